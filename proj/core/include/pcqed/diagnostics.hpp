// diagnostics.hpp — Spectral errors, perturbation strength, free-energy bounds, peak extraction

#pragma once

#include <vector>

#include "pcqed/master_equation.hpp"
#include "pcqed/spectra.hpp"

namespace pcqed {

inline constexpr double kIntegrationWindow = 62.8;   // rad/ps

// (int |S_ref - S|^2 / int |S_ref|^2)^{1/2} on the reference grid within |omega| <= window;
// S is linearly interpolated onto the reference grid.
double relative_error(const Spectrum& ref, const Spectrum& S, double window = kIntegrationWindow);
// Same metric after scaling both spectra to unit L2 norm over the window.
double normalized_relative_error(const Spectrum& ref, const Spectrum& S, double window = kIntegrationWindow);

struct PeakPair {
    double S_plus{0.0};
    double S_minus{0.0};
    double width_plus{0.0};     // half width at half maximum, rad/ps
    double width_minus{0.0};
    double weight_plus{0.0};
    double weight_minus{0.0};
    double height_plus{0.0};    // spectral value at the centre (spectrum route)
    double height_minus{0.0};
};

// Eigenmodes of L with the largest weight in the regression of vec(O int rho dt), O = a or sigma.
PeakPair extract_peaks(const Liouvillian& L, Route route = Route::cavity);
// Lorentzian least-squares fit (with dispersive admixture) around the two largest local maxima.
PeakPair extract_peaks(const Spectrum& S);

struct LorentzianModel {
    // S(omega) ~ sum_p (A_p g_p + D_p (omega - c_p)) / ((omega - c_p)^2 + g_p^2)
    double centre[2]{};
    double width[2]{};
    double absorptive[2]{};
    double dispersive[2]{};
    double operator()(double omega) const;
};
LorentzianModel fit_lorentzian_pair(const Spectrum& S);

// Weight outside +-3 widths of both fitted cores, after subtracting the fitted cores, over int S.
double sideband_fraction(const Spectrum& S, const LorentzianModel& model);

struct ShiftRenormalization {
    double shift{0.0};
    double delta_eta{0.0};
};
ShiftRenormalization shift_and_renormalization(const PeakPair& peaks, double g);

// Weights g_ij = ||A_i|| ||A_j|| on the frame's channels and kernels at tau = 0.
double perturbation_strength(const MasterEquationSpec& spec);

// -beta^{-1} ln Tr_{P1} e^{-beta H_frame}: system free energy on the single-excitation manifold.
double bogoliubov_bound(const MasterEquationSpec& spec);

// Indices of strict local maxima of S with |omega| < halfwidth.
std::vector<std::size_t> local_maxima(const Spectrum& S, double lo, double hi);

} // namespace pcqed
