// jc_reference.hpp — Closed-form Jaynes-Cummings spectra used as test oracles

#pragma once

#include <complex>
#include <functional>

#include "pcqed/spectra.hpp"

namespace pcqed::testing {

// Single-excitation resolvent of H_eff = [[delta/2, g], [g, -delta/2 - i kappa/2]] in the
// rotating frame, initial |X,0>. Cavity route: kappa |<1|(w - H_eff)^{-1}|X>|^2.
inline double jc_cavity_spectrum(double omega, double delta, double g, double kappa)
{
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> det = (omega - 0.5 * delta) * (omega + 0.5 * delta + 0.5 * i * kappa) - g * g;
    return kappa * std::norm(g / det);
}

// Dipole route without the Green's function: |<X|(w - H_eff)^{-1}|X>|^2.
inline double jc_dipole_correlation_spectrum(double omega, double delta, double g, double kappa)
{
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> det = (omega - 0.5 * delta) * (omega + 0.5 * delta + 0.5 * i * kappa) - g * g;
    return std::norm((omega + 0.5 * delta + 0.5 * i * kappa) / det);
}

// A spectrum on the grid of `like` filled with f(omega).
inline Spectrum sampled_like(const Spectrum& like, const std::function<double(double)>& f)
{
    Spectrum out;
    out.omega = like.omega;
    out.S.reserve(like.omega.size());
    for (double w : like.omega) out.S.push_back(f(w));
    return out;
}

} // namespace pcqed::testing
