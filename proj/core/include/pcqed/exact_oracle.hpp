// exact_oracle.hpp — Reference solutions: independent-boson lineshape and discrete-mode exact evolution

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pcqed/bath.hpp"
#include "pcqed/spectra.hpp"
#include "pcqed/system.hpp"

namespace pcqed {

struct DiscreteMode {
    double nu{0.0};   // rad/ps
    double g{0.0};    // rad/ps
};

struct DiscreteBath {
    std::vector<DiscreteMode> modes;
    int fock_cutoff{2};        // per-mode maximum occupation
    int max_total{4};          // cap on the total phonon number

    std::size_t M() const { return modes.size(); }
    double coupling_sum() const;          // sum g_k^2
    double reorganization() const;        // sum g_k^2 / nu_k
};

// Gauss-Legendre sampling of J on [0, nu_max]: nu_k nodes, g_k = sqrt(J(nu_k) w_k).
DiscreteBath discretize_bath(const BathParams& p, std::size_t M, double nu_max, int fock_cutoff = 2,
                             int max_total = -1);

// Number of bath occupation vectors and the total Hilbert dimension 3 * states.
std::size_t bath_state_count(std::size_t M, int fock_cutoff, int max_total);

// Independent-boson dipole correlator <sigma^dag(tau) sigma(0)> at g = 0 for a relaxed exciton,
// e^{i omega~ tau} <B>^2 e^{phi(tau)} e^{-gamma tau}, omega~ = omega_eg + Delta_p, evaluated with
// adaptive Gauss-Kronrod / Ooura Fourier quadrature independent of the bath module rules.
cdouble ibm_dipole_correlation(double tau, const BathParams& p, double omega_eg, double dephasing = 0.0);
std::vector<cdouble> ibm_dipole_correlation(const TauGrid& tau, const BathParams& p, double omega_eg,
                                            double dephasing = 0.0);

enum class InitialBath { thermal, displaced };

struct OracleOptions {
    double dt{0.02};                 // storage and correlator step, ps
    double t_max{0.0};               // 0: automatic from population_tol
    double population_tol{1e-12};
    double time_cap{400.0};
    std::size_t dimension_limit{20000};
    InitialBath initial{InitialBath::thermal};
    double thermal_cutoff{1e-10};    // drop initial Fock states with smaller Boltzmann weight
    bool t_integrated{true};         // false: only G(0, tau) correlators and population
};

struct ConvergenceReport {
    bool checked{false};
    bool converged{false};
    double cutoff_change{0.0};   // relative L2 change of the cavity spectrum on doubling the Fock cutoff
    double modes_change{0.0};    // ... on increasing M by 50%
    std::string detail;
};

struct OracleResult {
    TimeGrid grid;
    std::vector<double> population;              // exciton population on grid
    std::vector<cdouble> cavity_correlation;     // int dt <a^dag(t+tau) a(t)>, tau on grid
    std::vector<cdouble> dipole_correlation;     // int dt <sigma^dag(t+tau) sigma(t)>
    std::vector<cdouble> dipole_t0;              // <sigma^dag(tau) sigma(0)>
    Spectrum cavity_spectrum;
    Spectrum dipole_spectrum;
    ConvergenceReport report;
    std::size_t dimension{0};
};

OracleResult exact_evolve(const SystemParams& s, const DiscreteBath& bath, double temperature,
                          const OracleOptions& opts = {}, const SpectrumOptions& spectrum = {});

struct OracleRefinement {
    std::size_t M{8};
    double nu_max{0.0};          // 0: 4 nu_c
    int fock_cutoff{2};
    int max_total{4};
};

// Runs the oracle and its two refinements (Fock cutoff x2, M x1.5) and fills the report.
OracleResult converged_oracle(const SystemParams& s, const BathParams& p, const OracleRefinement& base,
                              const OracleOptions& opts = {}, const SpectrumOptions& spectrum = {},
                              double tolerance = 0.01);

} // namespace pcqed
