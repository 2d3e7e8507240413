// spectra.hpp — Time evolution, quantum-regression correlators and emission spectra

#pragma once

#include <map>
#include <string>
#include <vector>

#include "pcqed/master_equation.hpp"
#include "pcqed/system.hpp"

namespace pcqed {

enum class Route { cavity, dipole };
std::string to_string(Route r);
Route route_from_string(const std::string& name);

// Uniform time grid [0, t_max] with n_t points.
struct TimeGrid {
    double t_max{0.0};
    std::size_t n_t{1};
    double dt() const { return n_t > 1 ? t_max / static_cast<double>(n_t - 1) : 0.0; }
    double at(std::size_t i) const { return dt() * static_cast<double>(i); }
};

struct Spectrum {
    std::vector<double> omega;   // rad/ps, detuning from omega_bar
    std::vector<double> S;
    std::string method;
    std::string frame;
    std::string route;
    std::map<std::string, double> params;
    std::vector<std::string> warnings;
    double t_max{0.0};
    double tau_max{0.0};
    double dtau{0.0};
    double band_integral{0.0};   // sum S domega over the full discrete band (before any Green's function)
    double zero_lag{0.0};        // 2 pi Re G(0) with the same prefactor
    bool windowed{false};

    double step() const { return omega.size() > 1 ? omega[1] - omega[0] : 0.0; }
};

struct SpectrumOptions {
    double omega_window{62.8};      // |omega| range reported, rad/ps
    double omega_step{0.005};       // target frequency resolution, rad/ps
    double dtau{0.0};               // 0: automatic
    double t_max{0.0};              // 0: automatic from population_tol
    double tau_max{0.0};            // 0: automatic from coherence_tol
    double population_tol{1e-8};
    double coherence_tol{1e-8};
    double time_cap{400.0};         // ps; automatic grids stop here with a warning
    double window_trigger{1e-6};    // |G(tau_max)|/|G(0)| above which the Hann half-window is applied
    bool green_function{true};      // dipole route: multiply by the cavity Green's function
};

using Trajectory = std::vector<Operator>;

Operator initial_exciton_state();   // |X,0><X,0|

Trajectory evolve(const Liouvillian& L, const Operator& rho0, const TimeGrid& grid);

// G(t_i, tau_j) = Tr{O_left e^{L tau_j} O_right e^{L t_i} rho0}.
Eigen::MatrixXcd two_time(const Liouvillian& L, const Operator& O_left, const Operator& O_right, const Operator& rho0,
                          const TimeGrid& grid_t, const TimeGrid& grid_tau);

// Fourier assembly shared by all correlators: samples G(j dtau), j >= 0, conjugate-symmetric
// extension, optional Hann half-window, zero-padded DFT; S = prefactor * int G e^{-i omega tau}.
Spectrum assemble_spectrum(std::vector<cdouble> G, double dtau, double prefactor, const SpectrumOptions& opts);

// Cavity Green's function of the dipole route at detuning omega from omega_bar.
double cavity_green_function(double omega, const SystemParams& s);

Spectrum cavity_spectrum(const MasterEquationSpec& spec, const SpectrumOptions& opts = {});
Spectrum dipole_spectrum(const MasterEquationSpec& spec, const SpectrumOptions& opts = {});
Spectrum emission_spectrum(const MasterEquationSpec& spec, Route route, const SpectrumOptions& opts = {});

std::vector<double> exciton_population(const MasterEquationSpec& spec, const TimeGrid& grid);

// t_max at which the excited population of e^{Lt}|X><X| falls below tol (doubling search).
double decay_time(const Liouvillian& L, double tol, double cap, bool* reached = nullptr);

} // namespace pcqed
