// test_exact_oracle.cpp — Discrete-mode exact evolution and the independent-boson reference

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "jc_reference.hpp"
#include "pcqed/diagnostics.hpp"
#include "pcqed/errors.hpp"
#include "pcqed/exact_oracle.hpp"
#include "pcqed/master_equation.hpp"

using namespace pcqed;

namespace {

BathParams bath_at(double T, double alpha = 0.0251)
{
    BathParams p;
    p.temperature = T;
    p.alpha = alpha;
    return p;
}

SystemParams cavity_system(double g, double kappa = 0.5)
{
    SystemParams s;
    s.g = g;
    s.kappa = kappa;
    return s;
}

} // namespace

TEST_CASE("bath discretization")
{
    const BathParams p = bath_at(4.0);
    const double nc = p.nu_c;
    const DiscreteBath bath = discretize_bath(p, 60, 4.0 * nc);
    CHECK(bath.M() == 60);
    // Closed forms of the super-Ohmic moments on [0, inf).
    CHECK(bath.coupling_sum() == doctest::Approx(0.5 * p.alpha * std::pow(nc, 4)).scale(0.0).epsilon(5e-3));
    CHECK(bath.reorganization() ==
          doctest::Approx(0.25 * std::sqrt(std::numbers::pi) * p.alpha * std::pow(nc, 3)).scale(0.0).epsilon(5e-3));
    for (const auto& m : bath.modes) {
        CHECK(m.nu > 0.0);
        CHECK(m.nu < 4.0 * nc);
        CHECK(m.g > 0.0);
    }
    CHECK(discretize_bath(p, 0, 1.0).M() == 0);
    CHECK_THROWS_AS(discretize_bath(p, 4, 0.0), ConfigError);
    CHECK_THROWS_AS(discretize_bath(p, 4, 1.0, -1), ConfigError);
}

TEST_CASE("bath state counting")
{
    CHECK(bath_state_count(0, 2, -1) == 1);
    CHECK(bath_state_count(3, 2, -1) == 27);
    CHECK(bath_state_count(3, 2, 2) == 10);
    CHECK(bath_state_count(60, 2, 2) == 1 + 60 + 60 * 61 / 2);
    CHECK(bath_state_count(5, 1, 5) == 32);
}

TEST_CASE("independent-boson correlator")
{
    const BathParams p = bath_at(0.0);
    CHECK(std::abs(ibm_dipole_correlation(0.0, p, 0.0)) == doctest::Approx(1.0).scale(0.0).epsilon(1e-10));
    // Long-time modulus approaches the Franck-Condon weight exp(-alpha nu_c^2 / 2) at T = 0,
    // with the Re phi ~ -alpha / tau^2 tail.
    const double zpl = std::exp(-0.5 * p.alpha * p.nu_c * p.nu_c);
    const double tau = 50.0;
    CHECK(std::abs(ibm_dipole_correlation(tau, p, 0.0)) ==
          doctest::Approx(zpl * std::exp(-p.alpha / (tau * tau))).scale(0.0).epsilon(1e-7));
    // Phase winds at the polaron-shifted frequency once the sideband has decayed.
    const double shift = -0.25 * std::sqrt(std::numbers::pi) * p.alpha * std::pow(p.nu_c, 3);
    const cdouble a = ibm_dipole_correlation(40.0, p, 0.3);
    const cdouble b = ibm_dipole_correlation(40.1, p, 0.3);
    CHECK(std::arg(b / a) == doctest::Approx((0.3 + shift) * 0.1).scale(0.0).epsilon(1e-6));
    // Dephasing is a pure exponential envelope.
    CHECK(std::abs(ibm_dipole_correlation(20.0, p, 0.0, 0.05) / ibm_dipole_correlation(20.0, p, 0.0)) ==
          doctest::Approx(std::exp(-1.0)).scale(0.0).epsilon(1e-12));
    // Finite temperature: modulus decreasing on the sideband timescale, grid and point forms agree.
    const BathParams hot = bath_at(50.0);
    const std::vector<cdouble> grid = ibm_dipole_correlation(TauGrid{0.5, 21}, hot, 0.0);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        CHECK(std::abs(grid[j] - ibm_dipole_correlation(0.5 * static_cast<double>(j), hot, 0.0)) < 1e-14);
        if (j > 0 && j < 6) CHECK(std::abs(grid[j]) < std::abs(grid[j - 1]));
    }
    CHECK_THROWS_AS(ibm_dipole_correlation(-1.0, p, 0.0), DomainError);
}

TEST_CASE("zero modes reduce to the Jaynes-Cummings model")
{
    const SystemParams s = cavity_system(1.0);
    const OracleResult r = exact_evolve(s, discretize_bath(bath_at(0.0), 0, 1.0), 0.0);
    CHECK(r.dimension == 3);
    BathParams free = bath_at(0.0, 0.0);
    const std::vector<double> pop = exciton_population(build_weak(s, free), r.grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < pop.size(); ++i) worst = std::max(worst, std::abs(pop[i] - r.population[i]));
    CHECK(worst < 1e-12);
    CHECK(r.population.back() < 1e-10);
    const Spectrum ref = testing::sampled_like(
        r.cavity_spectrum, [&](double w) { return testing::jc_cavity_spectrum(w, s.delta(), s.g, s.kappa); });
    CHECK(normalized_relative_error(ref, r.cavity_spectrum) < 1e-3);
    CHECK(r.cavity_spectrum.method == "oracle");
}

TEST_CASE("displaced-bath dipole correlator at g = 0 follows the independent-boson model")
{
    const BathParams p = bath_at(0.0);
    SystemParams s = cavity_system(0.0);
    OracleOptions o;
    o.t_max = 10.0;
    o.t_integrated = false;
    o.initial = InitialBath::displaced;
    const OracleResult r = exact_evolve(s, discretize_bath(p, 60, 4.0 * p.nu_c, 2, 2), 0.0, o);
    REQUIRE(r.dipole_t0.size() == r.grid.n_t);
    double worst = 0.0;
    for (std::size_t i = 0; i < r.dipole_t0.size(); ++i) {
        worst = std::max(worst, std::abs(r.dipole_t0[i] - ibm_dipole_correlation(r.grid.at(i), p, 0.0)));
    }
    CHECK(worst < 2e-2);
    CHECK(r.population.back() == doctest::Approx(1.0).scale(0.0).epsilon(1e-10));

    OracleOptions hot = o;
    CHECK_THROWS_AS(exact_evolve(s, discretize_bath(p, 4, 4.0 * p.nu_c), 4.0, hot), ConfigError);
}

TEST_CASE("weak-coupling population dynamics against the master equations")
{
    const BathParams p = bath_at(0.0, 0.00251);
    const SystemParams s = cavity_system(1.0);
    OracleOptions o;
    o.t_max = 20.0;
    o.t_integrated = false;
    const OracleResult r = exact_evolve(s, discretize_bath(p, 16, 4.0 * p.nu_c, 2, 2), 0.0, o);
    for (Method m : {Method::weak, Method::variational}) {
        const std::vector<double> pop = exciton_population(build(m, s, p), r.grid);
        double worst = 0.0;
        for (std::size_t i = 0; i < pop.size(); ++i) worst = std::max(worst, std::abs(pop[i] - r.population[i]));
        CAPTURE(to_string(m));
        CHECK(worst < 1e-2);
    }
}

TEST_CASE("oracle guards and convergence report")
{
    const BathParams p = bath_at(4.0);
    const SystemParams s = cavity_system(1.0);
    CHECK_THROWS_AS(exact_evolve(s, discretize_bath(p, 20, 4.0 * p.nu_c, 2, -1), 4.0), ConfigError);
    CHECK_THROWS_AS(exact_evolve(s, discretize_bath(p, 2, 4.0 * p.nu_c), -1.0), ConfigError);
    OracleOptions bad;
    bad.dt = 0.0;
    CHECK_THROWS_AS(exact_evolve(s, discretize_bath(p, 2, 4.0 * p.nu_c), 4.0, bad), ConfigError);

    OracleRefinement base;
    base.M = 4;
    base.max_total = 2;
    const OracleResult r = converged_oracle(s, p, base);
    CHECK(r.report.checked);
    CHECK(r.report.cutoff_change >= 0.0);
    CHECK(r.report.modes_change >= 0.0);
    CHECK(r.report.converged == (r.report.cutoff_change < 0.01 && r.report.modes_change < 0.01));
    CHECK(!r.report.detail.empty());

    OracleOptions tight;
    tight.dimension_limit = 3 * bath_state_count(4, 2, 2);
    const OracleResult limited = converged_oracle(s, p, base, tight);
    CHECK(!limited.report.converged);
    CHECK(limited.report.detail.find("refinement not possible") == 0);
}
