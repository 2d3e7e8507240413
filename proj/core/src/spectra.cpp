// spectra.cpp — Exact-exponential QRT pipelines and the shared FFT spectrum assembly

#include "pcqed/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "pcqed/errors.hpp"

namespace pcqed {

std::string to_string(Route r) { return r == Route::cavity ? "cavity" : "dipole"; }

Route route_from_string(const std::string& name)
{
    if (name == "cavity") return Route::cavity;
    if (name == "dipole") return Route::dipole;
    throw ConfigError("unknown spectrum route '" + name + "'");
}

Operator initial_exciton_state() { return ops::projector(kX0); }

namespace {

double excited_population(const Operator& rho) { return rho(kX0, kX0).real() + rho(kG1, kG1).real(); }

double max_imag_eigenvalue(const Liouvillian& L)
{
    const auto& values = L.eig().values;
    double m = 0.0;
    for (Eigen::Index k = 0; k < values.size(); ++k) m = std::max(m, std::abs(values(k).imag()));
    return m;
}

std::size_t next_pow2(std::size_t n)
{
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fill_params(Spectrum& s, const MasterEquationSpec& spec)
{
    s.method = to_string(spec.method);
    s.frame = to_string(spec.frame);
    s.params = {{"omega_eg", spec.system.omega_eg}, {"omega_c", spec.system.omega_c},
                {"g", spec.system.g},               {"kappa", spec.system.kappa},
                {"alpha", spec.bath.alpha},         {"nu_c", spec.bath.nu_c},
                {"mu", spec.bath.mu},               {"temperature", spec.bath.temperature},
                {"dephasing_rate", spec.dephasing}, {"omega_bar", spec.system.mean_frequency()}};
    if (spec.profile) {
        s.params["R"] = spec.profile->R;
        s.params["B"] = spec.profile->B;
        s.params["gV"] = spec.profile->gV;
    }
}

} // namespace

double decay_time(const Liouvillian& L, double tol, double cap, bool* reached)
{
    const VecState rho0 = vec(initial_exciton_state());
    double t = 8.0;
    for (;;) {
        const Operator rho = unvec(L.propagator(t) * rho0);
        if (excited_population(rho) < tol) {
            if (reached) *reached = true;
            return t;
        }
        if (2.0 * t > cap) {
            if (reached) *reached = false;
            return cap;
        }
        t *= 2.0;
    }
}

Trajectory evolve(const Liouvillian& L, const Operator& rho0, const TimeGrid& grid)
{
    Trajectory out;
    out.reserve(grid.n_t);
    VecState v = vec(rho0);
    out.push_back(rho0);
    if (grid.n_t < 2) return out;
    const SuperOperator P = L.propagator(grid.dt());
    for (std::size_t i = 1; i < grid.n_t; ++i) {
        v = P * v;
        out.push_back(unvec(v));
    }
    return out;
}

Eigen::MatrixXcd two_time(const Liouvillian& L, const Operator& O_left, const Operator& O_right, const Operator& rho0,
                          const TimeGrid& grid_t, const TimeGrid& grid_tau)
{
    const double wmax = max_imag_eigenvalue(L);
    for (const TimeGrid* g : {&grid_t, &grid_tau}) {
        if (g->n_t > 1 && g->dt() * wmax >= 0.25) {
            throw ConfigError("two_time: time step does not resolve the Liouvillian frequencies (dt*max|Im| >= 0.25)");
        }
    }
    const Operator final_state = unvec(L.propagator(grid_t.t_max) * vec(rho0));
    if (excited_population(final_state) >= 1e-4) {
        throw ConfigError("two_time: t_max too short, excited population has not decayed below 1e-4");
    }
    const Trajectory rho = evolve(L, rho0, grid_t);
    const SuperOperator P = L.propagator(grid_tau.dt());
    Eigen::MatrixXcd G(static_cast<Eigen::Index>(grid_t.n_t), static_cast<Eigen::Index>(grid_tau.n_t));
    for (std::size_t i = 0; i < grid_t.n_t; ++i) {
        VecState x = vec(O_right * rho[i]);
        for (std::size_t j = 0; j < grid_tau.n_t; ++j) {
            if (j > 0) x = P * x;
            G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (O_left * unvec(x)).trace();
        }
    }
    return G;
}

Spectrum assemble_spectrum(std::vector<cdouble> G, double dtau, double prefactor, const SpectrumOptions& opts)
{
    if (G.size() < 2 || !(dtau > 0.0)) throw ConfigError("assemble_spectrum: need >= 2 samples and dtau > 0");
    Spectrum out;
    out.dtau = dtau;
    out.tau_max = dtau * static_cast<double>(G.size() - 1);
    const double g0 = std::abs(G.front());
    const double tail = g0 > 0.0 ? std::abs(G.back()) / g0 : 0.0;
    if (tail > opts.window_trigger) {
        out.windowed = true;
        out.warnings.push_back("correlator not decayed at tau_max (ratio " + std::to_string(tail) +
                               "); Hann half-window applied");
        const double n1 = static_cast<double>(G.size() - 1);
        for (std::size_t j = 0; j < G.size(); ++j) {
            const double c = std::cos(0.5 * std::numbers::pi * static_cast<double>(j) / n1);
            G[j] *= c * c;
        }
    }
    G.front() *= 0.5;

    const std::size_t n_res = static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi / (dtau * opts.omega_step)));
    const std::size_t N = next_pow2(std::max(n_res, 2 * G.size()));
    std::vector<cdouble> in(N, 0.0), X;
    std::copy(G.begin(), G.end(), in.begin());
    Eigen::FFT<double> fft;
    fft.fwd(X, in);

    const double domega = 2.0 * std::numbers::pi / (static_cast<double>(N) * dtau);
    double band = 0.0;
    std::vector<double> full(N);
    for (std::size_t k = 0; k < N; ++k) {
        full[k] = prefactor * 2.0 * dtau * X[k].real();
        band += full[k] * domega;
    }
    out.band_integral = band;
    out.zero_lag = prefactor * 2.0 * std::numbers::pi * (2.0 * G.front()).real();

    const auto K = std::min<std::size_t>(static_cast<std::size_t>(std::floor(opts.omega_window / domega)), N / 2 - 1);
    out.omega.reserve(2 * K + 1);
    out.S.reserve(2 * K + 1);
    for (std::size_t i = 0; i < 2 * K + 1; ++i) {
        const auto k = static_cast<long long>(i) - static_cast<long long>(K);
        const std::size_t idx = k >= 0 ? static_cast<std::size_t>(k) : N - static_cast<std::size_t>(-k);
        out.omega.push_back(domega * static_cast<double>(k));
        out.S.push_back(full[idx]);
    }
    return out;
}

double cavity_green_function(double omega, const SystemParams& s)
{
    if (!(s.kappa > 0.0)) throw ConfigError("dipole route needs kappa > 0 for the cavity Green's function");
    const double half = 0.5 * s.kappa;
    const double x = omega - (s.omega_c - s.mean_frequency());
    return (4.0 * s.g * s.g / s.kappa) * half * half / (x * x + half * half);
}

Spectrum emission_spectrum(const MasterEquationSpec& spec, Route route, const SpectrumOptions& opts)
{
    const Liouvillian L = assemble(spec);
    std::vector<std::string> warnings;

    double t_max = opts.t_max;
    if (t_max <= 0.0) {
        bool reached = false;
        t_max = decay_time(L, opts.population_tol, opts.time_cap, &reached);
        if (!reached) {
            warnings.push_back("excited population not decayed within the time cap; t-integral truncated at " +
                               std::to_string(t_max) + " ps");
        }
    }
    const Operator O = route == Route::cavity ? ops::cavity() : ops::sigma();
    const Operator R = unvec(L.integrated_action(vec(initial_exciton_state()), t_max));
    const VecState M = vec(O * R);

    const double wmax = max_imag_eigenvalue(L);
    double dtau = opts.dtau;
    if (dtau <= 0.0) {
        dtau = 0.5 * std::numbers::pi / opts.omega_window;
        if (wmax > 0.0) dtau = std::min(dtau, 0.25 / wmax);
    }
    double tau_max = opts.tau_max;
    const SuperOperator P = L.propagator(dtau);
    const double m0 = M.norm();
    std::size_t count = 0;
    std::vector<cdouble> G;
    const Operator Odag = O.adjoint();
    if (tau_max > 0.0) {
        count = static_cast<std::size_t>(std::ceil(tau_max / dtau)) + 1;
    } else {
        count = static_cast<std::size_t>(std::ceil(opts.time_cap / dtau)) + 1;
    }
    G.reserve(count);
    VecState x = M;
    for (std::size_t j = 0; j < count; ++j) {
        if (j > 0) x = P * x;
        G.push_back((Odag * unvec(x)).trace());
        if (opts.tau_max <= 0.0 && j > 0 && x.norm() < opts.coherence_tol * m0) break;
    }
    TauGrid tau{dtau, G.size()};
    const SidebandFactor& factor = route == Route::cavity ? spec.cavity_sideband : spec.dipole_sideband;
    if (!factor.trivial()) {
        const std::vector<cdouble> f = factor.evaluate(tau);
        for (std::size_t j = 0; j < G.size(); ++j) G[j] *= f[j];
    }

    const double prefactor = route == Route::cavity ? spec.system.kappa : 1.0;
    Spectrum out = assemble_spectrum(std::move(G), dtau, prefactor, opts);
    out.t_max = t_max;
    out.route = to_string(route);
    fill_params(out, spec);
    if (route == Route::dipole && opts.green_function) {
        for (std::size_t k = 0; k < out.omega.size(); ++k) out.S[k] *= cavity_green_function(out.omega[k], spec.system);
    }
    const StabilityReport stab = L.stability();
    if (!stab.stable()) {
        warnings.push_back("Liouvillian has " + std::to_string(stab.positive.size()) +
                           " eigenvalue(s) with positive real part (max " + std::to_string(stab.max_real) + ")");
    }
    warnings.insert(warnings.end(), out.warnings.begin(), out.warnings.end());
    out.warnings = std::move(warnings);
    return out;
}

Spectrum cavity_spectrum(const MasterEquationSpec& spec, const SpectrumOptions& opts)
{
    return emission_spectrum(spec, Route::cavity, opts);
}

Spectrum dipole_spectrum(const MasterEquationSpec& spec, const SpectrumOptions& opts)
{
    return emission_spectrum(spec, Route::dipole, opts);
}

std::vector<double> exciton_population(const MasterEquationSpec& spec, const TimeGrid& grid)
{
    const Trajectory traj = evolve(assemble(spec), initial_exciton_state(), grid);
    std::vector<double> out;
    out.reserve(traj.size());
    for (const auto& rho : traj) out.push_back(rho(kX0, kX0).real());
    return out;
}

} // namespace pcqed
