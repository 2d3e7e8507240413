// test_diagnostics.cpp — Spectral error metrics, peak extraction, perturbation strength and bounds

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "jc_reference.hpp"
#include "pcqed/diagnostics.hpp"
#include "pcqed/errors.hpp"

using namespace pcqed;

namespace {

SystemParams resonant(double g, double kappa = 0.5)
{
    SystemParams s;
    s.g = g;
    s.kappa = kappa;
    return s;
}

BathParams bath_at(double T, double alpha = 0.0251)
{
    BathParams p;
    p.temperature = T;
    p.alpha = alpha;
    return p;
}

Spectrum on_grid(double lo, double hi, double step, const std::function<double(double)>& f)
{
    Spectrum s;
    const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step));
    for (std::size_t k = 0; k <= n; ++k) {
        const double w = lo + step * static_cast<double>(k);
        s.omega.push_back(w);
        s.S.push_back(f(w));
    }
    return s;
}

} // namespace

TEST_CASE("relative error metrics")
{
    const auto lorentz = [](double c, double w) {
        return [=](double x) { return w / ((x - c) * (x - c) + w * w); };
    };
    const Spectrum a = on_grid(-80.0, 80.0, 0.01, lorentz(0.5, 0.3));
    const Spectrum b = on_grid(-80.0, 80.0, 0.01, lorentz(0.6, 0.3));
    const Spectrum c = on_grid(-80.0, 80.0, 0.01, lorentz(0.6, 0.4));

    CHECK(relative_error(a, a) == 0.0);
    Spectrum twice = a;
    for (double& v : twice.S) v *= 2.0;
    CHECK(relative_error(a, twice) == doctest::Approx(1.0).scale(0.0).epsilon(1e-12));
    CHECK(normalized_relative_error(a, twice) < 1e-12);

    const double nab = relative_error(a, b);
    const double nbc = relative_error(b, c);
    const double nac = relative_error(a, c);
    CHECK(nab > 0.0);
    // Triangle inequality of the L2 norm, with the b-denominator rescaled to the a-norm.
    const Spectrum zero = on_grid(-80.0, 80.0, 0.01, [](double) { return 0.0; });
    CHECK(relative_error(a, zero) == doctest::Approx(1.0).scale(0.0).epsilon(1e-12));
    const double scale = [&] {
        double na = 0.0, nb = 0.0;
        for (std::size_t k = 0; k < a.S.size(); ++k) {
            if (std::abs(a.omega[k]) > kIntegrationWindow) continue;
            na += a.S[k] * a.S[k];
            nb += b.S[k] * b.S[k];
        }
        return std::sqrt(nb / na);
    }();
    CHECK(nac <= nab + nbc * scale * (1.0 + 1e-9));

    SUBCASE("coarse test grids are linearly interpolated")
    {
        const auto linear = [](double x) { return 2.0 + 0.01 * x; };
        const Spectrum fine = on_grid(-10.0, 10.0, 0.01, linear);
        const Spectrum coarse = on_grid(-10.0, 10.0, 0.5, linear);
        CHECK(relative_error(fine, coarse) < 1e-13);
    }
    SUBCASE("only the integration window counts")
    {
        Spectrum far = a;
        for (std::size_t k = 0; k < far.S.size(); ++k) {
            if (std::abs(far.omega[k]) > kIntegrationWindow + 1.0) far.S[k] += 100.0;
        }
        CHECK(relative_error(a, far) < 1e-14);
        CHECK(relative_error(a, far, 80.0) > 1.0);
    }
    SUBCASE("degenerate input")
    {
        CHECK_THROWS_AS(relative_error(zero, a), NumericalError);
        CHECK_THROWS_AS(normalized_relative_error(a, zero), NumericalError);
        CHECK_THROWS_AS(relative_error(Spectrum{}, a), ConfigError);
    }
}

TEST_CASE("phonon-free polariton peaks")
{
    const double kappa = 0.5;
    for (double g : {0.57, 2.23}) {
        const MasterEquationSpec spec = build_weak(resonant(g, kappa), bath_at(4.0, 0.0));
        const double centre = std::sqrt(g * g - kappa * kappa / 16.0);

        const PeakPair L = extract_peaks(assemble(spec));
        CHECK(L.S_plus == doctest::Approx(centre).scale(0.0).epsilon(1e-10));
        CHECK(L.S_minus == doctest::Approx(-centre).scale(0.0).epsilon(1e-10));
        CHECK(L.width_plus == doctest::Approx(kappa / 4.0).scale(0.0).epsilon(1e-10));
        CHECK(L.width_minus == doctest::Approx(kappa / 4.0).scale(0.0).epsilon(1e-10));
        CHECK(L.weight_plus + L.weight_minus <= 1.0 + 1e-12);
        CHECK(L.weight_plus == doctest::Approx(L.weight_minus).scale(0.0).epsilon(1e-8));

        const PeakPair F = extract_peaks(cavity_spectrum(spec));
        CHECK(std::abs(F.S_plus - centre) < 1e-3 * kappa);
        CHECK(std::abs(F.S_minus + centre) < 1e-3 * kappa);
        CHECK(std::abs(F.width_plus - kappa / 4.0) < 1e-3 * kappa);

        const ShiftRenormalization sr = shift_and_renormalization(L, g);
        CHECK(std::abs(sr.shift) < 1e-10);
        CHECK(sr.delta_eta == doctest::Approx(centre / g).scale(0.0).epsilon(1e-10));
    }
}

TEST_CASE("synthetic Lorentzian pair fit")
{
    const double kappa = 0.5;
    LorentzianModel truth;
    truth.centre[0] = -1.9;
    truth.centre[1] = 2.1;
    truth.width[0] = 0.15;
    truth.width[1] = 0.2;
    truth.absorptive[0] = 0.8;
    truth.absorptive[1] = 0.5;
    truth.dispersive[0] = 0.05;
    truth.dispersive[1] = -0.03;
    const Spectrum S = on_grid(-62.8, 62.8, 0.005, [&](double w) { return truth(w); });
    const LorentzianModel fit = fit_lorentzian_pair(S);
    const int lo = fit.centre[0] < fit.centre[1] ? 0 : 1;
    const int hi = 1 - lo;
    CHECK(std::abs(fit.centre[lo] - truth.centre[0]) < 1e-3 * kappa);
    CHECK(std::abs(fit.centre[hi] - truth.centre[1]) < 1e-3 * kappa);
    CHECK(std::abs(fit.width[lo] - truth.width[0]) < 1e-3 * kappa);
    CHECK(std::abs(fit.width[hi] - truth.width[1]) < 1e-3 * kappa);
    CHECK(std::abs(fit.absorptive[lo] - truth.absorptive[0]) < 1e-3);
    CHECK(std::abs(fit.dispersive[hi] - truth.dispersive[1]) < 1e-3);
    CHECK(sideband_fraction(S, fit) < 1e-3);

    const PeakPair p = extract_peaks(S);
    CHECK(p.S_plus > p.S_minus);
    CHECK(p.weight_plus + p.weight_minus == doctest::Approx(1.0).scale(0.0).epsilon(1e-12));
    CHECK(p.height_plus == doctest::Approx(truth(p.S_plus)).scale(0.0).epsilon(1e-3));

    SUBCASE("a broad background shows up as sideband weight")
    {
        Spectrum dressed = S;
        for (std::size_t k = 0; k < dressed.S.size(); ++k) {
            const double x = dressed.omega[k] - 4.0;
            dressed.S[k] += 0.02 * std::exp(-x * x / 4.0);
        }
        const double background = 0.02 * std::sqrt(4.0 * std::numbers::pi);
        const double total = background + std::numbers::pi * (truth.absorptive[0] + truth.absorptive[1]);
        const double f = sideband_fraction(dressed, fit_lorentzian_pair(dressed));
        CHECK(f > 0.3 * background / total);
        CHECK(f < 1.5 * background / total);
    }
}

TEST_CASE("Liouvillian and spectrum routes agree on the polariton peaks")
{
    for (Method m : {Method::weak, Method::polaron, Method::variational, Method::polariton_polaron}) {
        const MasterEquationSpec spec = build(m, resonant(2.23), bath_at(4.0));
        const PeakPair L = extract_peaks(assemble(spec));
        const PeakPair F = extract_peaks(cavity_spectrum(spec));
        CAPTURE(to_string(m));
        CHECK(std::abs(L.S_plus - F.S_plus) < 0.02 * std::abs(L.S_plus));
        CHECK(std::abs(L.S_minus - F.S_minus) < 0.02 * std::abs(L.S_minus));
    }
}

TEST_CASE("shift and renormalization extraction")
{
    PeakPair p;
    p.S_plus = 1.1;
    p.S_minus = -0.9;
    const ShiftRenormalization sr = shift_and_renormalization(p, 1.0);
    CHECK(sr.shift == doctest::Approx(0.2).scale(0.0).epsilon(1e-14));
    CHECK(sr.delta_eta == doctest::Approx(std::sqrt(3.96) / 2.0).scale(0.0).epsilon(1e-14));
    p.S_minus = 0.5;
    CHECK_THROWS_AS(shift_and_renormalization(p, 1.0), NumericalError);
    CHECK_THROWS_AS(shift_and_renormalization(p, 0.0), ConfigError);
}

TEST_CASE("degenerate peak configurations")
{
    const MasterEquationSpec dark = build_weak(resonant(0.0), bath_at(4.0, 0.0));
    CHECK_THROWS_AS(extract_peaks(assemble(dark)), DegeneratePeaksError);
    const Spectrum single = on_grid(-10.0, 10.0, 0.01, [](double w) { return 1.0 / (w * w + 0.01); });
    CHECK_THROWS_AS(extract_peaks(single), DegeneratePeaksError);
    CHECK(local_maxima(single, -1.0, 1.0).size() == 1);
    CHECK(local_maxima(single, 0.5, 1.0).empty());
}

TEST_CASE("perturbation strength")
{
    CHECK(perturbation_strength(build_weak(resonant(2.23), bath_at(4.0, 0.0))) == 0.0);
    for (double T : {4.0, 50.0}) {
        for (double g : {0.57, 2.23, 7.91}) {
            const SystemParams s = resonant(g);
            const BathParams p = bath_at(T);
            const double weak = perturbation_strength(build_weak(s, p));
            const double polaron = perturbation_strength(build_polaron(s, p));
            const double var = perturbation_strength(build_variational(s, p));
            CAPTURE(T);
            CAPTURE(g);
            CHECK(weak > 0.0);
            CHECK(polaron > 0.0);
            CHECK(var <= std::min(weak, polaron) * (1.0 + 1e-9));
        }
    }
    // Weak coupling has a single channel of unit norm: PS = |C_ZZ(0)| / nu_c^2.
    const MasterEquationSpec weak = build_weak(resonant(2.23), bath_at(4.0));
    const double c0 = std::abs(weak.table->at(Kernel::Z, Kernel::Z).front());
    CHECK(perturbation_strength(weak) == doctest::Approx(c0 / (weak.bath.nu_c * weak.bath.nu_c)).scale(0.0).epsilon(1e-14));
}

TEST_CASE("free-energy bound")
{
    const double g = 2.23;
    const MasterEquationSpec zero_T = build_weak(resonant(g), bath_at(0.0));
    CHECK(bogoliubov_bound(zero_T) == doctest::Approx(-g).scale(0.0).epsilon(1e-14));
    const BathParams hot = bath_at(50.0);
    const MasterEquationSpec weak = build_weak(resonant(g), hot);
    const double beta = beta_hbar(50.0);
    CHECK(bogoliubov_bound(weak) ==
          doctest::Approx(-g - std::log1p(std::exp(-2.0 * beta * g)) / beta).scale(0.0).epsilon(1e-12));
    for (double T : {4.0, 50.0}) {
        for (double gg : {0.57, 2.23, 7.91}) {
            const SystemParams s = resonant(gg);
            const BathParams p = bath_at(T);
            const double var = bogoliubov_bound(build_variational(s, p));
            CAPTURE(T);
            CAPTURE(gg);
            CHECK(var <= bogoliubov_bound(build_weak(s, p)) + 1e-12);
            CHECK(var <= bogoliubov_bound(build_polaron(s, p)) + 1e-12);
        }
    }
}
