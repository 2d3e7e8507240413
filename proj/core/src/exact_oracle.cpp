// exact_oracle.cpp — Truncated Fock-space evolution with discrete modes and the independent-boson lineshape

#include "pcqed/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include <Eigen/Sparse>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <unsupported/Eigen/FFT>

#include "pcqed/errors.hpp"

namespace pcqed {

namespace {

using Occupation = std::vector<std::uint8_t>;
using SparseH = Eigen::SparseMatrix<cdouble, Eigen::RowMajor>;

void enumerate_states(std::size_t M, int cutoff, int cap, Occupation& cur, std::size_t k, int used,
                      std::vector<Occupation>& out)
{
    if (k == M) {
        out.push_back(cur);
        return;
    }
    for (int n = 0; n <= cutoff && used + n <= cap; ++n) {
        cur[k] = static_cast<std::uint8_t>(n);
        enumerate_states(M, cutoff, cap, cur, k + 1, used + n, out);
    }
    cur[k] = 0;
}

int effective_cap(std::size_t M, int cutoff, int max_total)
{
    const int full = static_cast<int>(M) * cutoff;
    return max_total < 0 ? full : std::min(max_total, full);
}

// Fixed-step Taylor propagation of psi' = -i H psi.
class TaylorPropagator {
public:
    TaylorPropagator(const SparseH& H, double dt) : H_(H), dt_(dt) {}

    void step(Eigen::VectorXcd& psi) const
    {
        const cdouble f(0.0, -dt_);
        Eigen::VectorXcd term = psi;
        Eigen::VectorXcd acc = psi;
        const double base = psi.norm();
        for (int k = 1; k <= 60; ++k) {
            term = (f / static_cast<double>(k)) * (H_ * term);
            acc += term;
            if (term.norm() <= 1e-16 * std::max(base, 1e-300)) break;
        }
        psi = acc;
    }

private:
    const SparseH& H_;
    double dt_;
};

double relative_l2(const std::vector<double>& ref, const std::vector<double>& test)
{
    const std::size_t n = std::min(ref.size(), test.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (ref[i] - test[i]) * (ref[i] - test[i]);
        den += ref[i] * ref[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

} // namespace

double DiscreteBath::coupling_sum() const
{
    double s = 0.0;
    for (const auto& m : modes) s += m.g * m.g;
    return s;
}

double DiscreteBath::reorganization() const
{
    double s = 0.0;
    for (const auto& m : modes) s += m.g * m.g / m.nu;
    return s;
}

DiscreteBath discretize_bath(const BathParams& p, std::size_t M, double nu_max, int fock_cutoff, int max_total)
{
    p.validate();
    if (!(nu_max > 0.0)) throw ConfigError("discretize_bath: nu_max must be > 0");
    if (fock_cutoff < 0) throw ConfigError("discretize_bath: fock_cutoff must be >= 0");
    DiscreteBath bath;
    bath.fock_cutoff = fock_cutoff;
    bath.max_total = effective_cap(M, fock_cutoff, max_total);
    if (M == 0) return bath;
    std::vector<double> x, w;
    gauss_legendre_unit(M, x, w);
    for (std::size_t k = 0; k < M; ++k) {
        const double nu = 0.5 * nu_max * (x[k] + 1.0);
        const double wk = 0.5 * nu_max * w[k];
        bath.modes.push_back({nu, std::sqrt(spectral_density(nu, p) * wk)});
    }
    return bath;
}

std::size_t bath_state_count(std::size_t M, int fock_cutoff, int max_total)
{
    // Count occupation vectors with n_k <= cutoff and sum <= cap by dynamic programming.
    const int cap = effective_cap(M, fock_cutoff, max_total);
    std::vector<double> ways(static_cast<std::size_t>(cap) + 1, 0.0);
    ways[0] = 1.0;
    for (std::size_t k = 0; k < M; ++k) {
        std::vector<double> next(ways.size(), 0.0);
        for (int used = 0; used <= cap; ++used) {
            for (int n = 0; n <= fock_cutoff && used + n <= cap; ++n) next[static_cast<std::size_t>(used + n)] += ways[static_cast<std::size_t>(used)];
        }
        ways = std::move(next);
    }
    double total = 0.0;
    for (double v : ways) total += v;
    return total > 1e18 ? static_cast<std::size_t>(1e18) : static_cast<std::size_t>(total);
}

namespace {

struct IbmIntegrals {
    double shift{0.0};   // Delta_p
    double B2{1.0};      // <B>^2 at F == 1
};

double ibm_coth(double nu, double T)
{
    if (T == 0.0) return 1.0;
    return 1.0 / std::tanh(0.5 * kHbarOverKb / T * nu);
}

IbmIntegrals ibm_integrals(const BathParams& p)
{
    using boost::math::quadrature::gauss_kronrod;
    const double top = 12.0 * p.nu_c;
    auto J = [&](double nu) { return p.alpha * nu * nu * nu * std::exp(-(nu * nu) / (p.nu_c * p.nu_c)); };
    IbmIntegrals out;
    out.shift = -gauss_kronrod<double, 61>::integrate([&](double nu) { return nu > 0 ? J(nu) / nu : 0.0; }, 0.0, top,
                                                       15, 1e-14);
    const double s = gauss_kronrod<double, 61>::integrate(
        [&](double nu) { return nu > 0 ? J(nu) / (nu * nu) * ibm_coth(nu, p.temperature) : 0.0; }, 0.0, top, 15, 1e-14);
    out.B2 = std::exp(-s);
    return out;
}

cdouble ibm_phi(double tau, const BathParams& p)
{
    using boost::math::quadrature::gauss_kronrod;
    auto weight = [&](double nu) {
        return nu > 0 ? p.alpha * nu * std::exp(-(nu * nu) / (p.nu_c * p.nu_c)) : 0.0;
    };
    // alpha nu coth(b nu) e^{-nu^2/nu_c^2}, regular at nu -> 0.
    auto thermal = [&](double nu) {
        if (p.temperature == 0.0) return weight(nu);
        const double b = 0.5 * kHbarOverKb / p.temperature;
        const double x = b * std::abs(nu);
        const double nu_coth = x < 1e-6 ? (1.0 + x * x / 3.0) / b : std::abs(nu) / std::tanh(x);
        return p.alpha * nu_coth * std::exp(-(nu * nu) / (p.nu_c * p.nu_c));
    };
    if (tau * p.nu_c < 8.0) {
        const double top = 12.0 * p.nu_c;
        const double re = gauss_kronrod<double, 61>::integrate(
            [&](double nu) { return thermal(nu) * std::cos(nu * tau); },
            0.0, top, 20, 1e-14);
        const double im = gauss_kronrod<double, 61>::integrate(
            [&](double nu) { return weight(nu) * std::sin(nu * tau); }, 0.0, top, 20, 1e-14);
        return {re, -im};
    }
    static thread_local boost::math::quadrature::ooura_fourier_cos<double> cos_rule(1e-13, 8);
    static thread_local boost::math::quadrature::ooura_fourier_sin<double> sin_rule(1e-13, 8);
    const double re = cos_rule.integrate(thermal, tau).first;
    const double im = sin_rule.integrate(weight, tau).first;
    return {re, -im};
}

} // namespace

cdouble ibm_dipole_correlation(double tau, const BathParams& p, double omega_eg, double dephasing)
{
    if (tau < 0.0) throw DomainError("ibm_dipole_correlation: tau must be >= 0");
    const IbmIntegrals I = ibm_integrals(p);
    return std::polar(1.0, (omega_eg + I.shift) * tau) * I.B2 * std::exp(ibm_phi(tau, p)) * std::exp(-dephasing * tau);
}

std::vector<cdouble> ibm_dipole_correlation(const TauGrid& tau, const BathParams& p, double omega_eg, double dephasing)
{
    const IbmIntegrals I = ibm_integrals(p);
    std::vector<cdouble> out(tau.count);
    for (std::size_t j = 0; j < tau.count; ++j) {
        const double t = tau.at(j);
        out[j] = std::polar(1.0, (omega_eg + I.shift) * t) * I.B2 * std::exp(ibm_phi(t, p)) * std::exp(-dephasing * t);
    }
    return out;
}

OracleResult exact_evolve(const SystemParams& s, const DiscreteBath& bath, double temperature, const OracleOptions& opts,
                          const SpectrumOptions& spectrum)
{
    s.validate();
    if (temperature < 0.0) throw ConfigError("oracle temperature must be >= 0");
    if (!(opts.dt > 0.0)) throw ConfigError("oracle dt must be > 0");
    const std::size_t M = bath.M();
    const int cutoff = M == 0 ? 0 : bath.fock_cutoff;
    const int cap = effective_cap(M, cutoff, bath.max_total);
    const std::size_t count = bath_state_count(M, cutoff, cap);
    if (3 * count > opts.dimension_limit) {
        throw ConfigError("oracle Hilbert dimension " + std::to_string(3 * count) + " exceeds the limit " +
                          std::to_string(opts.dimension_limit) +
                          "; reduce the mode count, the per-mode Fock cutoff or the total phonon cap");
    }

    std::vector<Occupation> states;
    Occupation cur(M, 0);
    enumerate_states(M, cutoff, cap, cur, 0, 0, states);
    const std::size_t B = states.size();
    std::map<Occupation, std::size_t> index;
    for (std::size_t i = 0; i < B; ++i) index.emplace(states[i], i);

    std::vector<double> energy(B, 0.0);
    for (std::size_t i = 0; i < B; ++i) {
        for (std::size_t k = 0; k < M; ++k) energy[i] += bath.modes[k].nu * states[i][k];
    }

    // Excited manifold ordering: [X,0 > (x) bath | g,1 > (x) bath].
    const double delta = s.delta();
    std::vector<Eigen::Triplet<cdouble>> trip;
    const cdouble half_loss(0.0, -0.5 * s.kappa);
    for (std::size_t i = 0; i < B; ++i) {
        trip.emplace_back(i, i, 0.5 * delta + energy[i]);
        trip.emplace_back(B + i, B + i, -0.5 * delta + energy[i] + half_loss);
        if (s.g != 0.0) {
            trip.emplace_back(i, B + i, s.g);
            trip.emplace_back(B + i, i, s.g);
        }
        for (std::size_t k = 0; k < M; ++k) {
            if (states[i][k] >= cutoff) continue;
            Occupation up = states[i];
            ++up[k];
            const auto it = index.find(up);
            if (it == index.end()) continue;
            const double amp = bath.modes[k].g * std::sqrt(static_cast<double>(states[i][k]) + 1.0);
            if (amp == 0.0) continue;
            trip.emplace_back(it->second, i, amp);
            trip.emplace_back(i, it->second, amp);
        }
    }
    SparseH H(static_cast<Eigen::Index>(2 * B), static_cast<Eigen::Index>(2 * B));
    H.setFromTriplets(trip.begin(), trip.end());
    const TaylorPropagator prop(H, opts.dt);

    // Initial bath ensemble: list of (weight, bath vector).
    std::vector<std::pair<double, Eigen::VectorXcd>> ensemble;
    if (opts.initial == InitialBath::displaced) {
        if (temperature != 0.0) throw ConfigError("displaced initial bath is only supported at T = 0");
        Eigen::VectorXcd v(static_cast<Eigen::Index>(B));
        for (std::size_t i = 0; i < B; ++i) {
            double amp = 1.0;
            for (std::size_t k = 0; k < M; ++k) {
                const double a = -bath.modes[k].g / bath.modes[k].nu;
                amp *= std::exp(-0.5 * a * a) * std::pow(a, states[i][k]) / std::sqrt(std::tgamma(states[i][k] + 1.0));
            }
            v(static_cast<Eigen::Index>(i)) = amp;
        }
        v.normalize();
        ensemble.emplace_back(1.0, v);
    } else {
        const double beta = beta_hbar(temperature);
        std::vector<double> w(B, 0.0);
        double Z = 0.0;
        for (std::size_t i = 0; i < B; ++i) {
            w[i] = std::isfinite(beta) ? std::exp(-beta * energy[i]) : (energy[i] == 0.0 ? 1.0 : 0.0);
            Z += w[i];
        }
        double kept = 0.0;
        for (std::size_t i = 0; i < B; ++i) {
            if (w[i] / Z < opts.thermal_cutoff) continue;
            Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(B));
            v(static_cast<Eigen::Index>(i)) = 1.0;
            ensemble.emplace_back(w[i] / Z, v);
            kept += w[i] / Z;
        }
        for (auto& e : ensemble) e.first /= kept;
    }

    OracleResult result;
    result.dimension = 3 * B;
    std::size_t n_t = 0;
    if (opts.t_max > 0.0) n_t = static_cast<std::size_t>(std::ceil(opts.t_max / opts.dt)) + 1;
    const std::size_t n_cap = static_cast<std::size_t>(std::ceil(opts.time_cap / opts.dt)) + 1;

    Eigen::FFT<double> fft;
    for (std::size_t member = 0; member < ensemble.size(); ++member) {
        const double weight = ensemble[member].first;
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(2 * B));
        psi.head(static_cast<Eigen::Index>(B)) = ensemble[member].second;

        std::vector<Eigen::VectorXcd> trajectory;
        const std::size_t limit = n_t > 0 ? n_t : n_cap;
        for (std::size_t i = 0; i < limit; ++i) {
            if (i > 0) prop.step(psi);
            trajectory.push_back(psi);
            if (n_t == 0 && psi.squaredNorm() < opts.population_tol) break;
        }
        if (n_t == 0) n_t = trajectory.size();
        if (result.population.empty()) {
            result.population.assign(n_t, 0.0);
            result.dipole_t0.assign(n_t, 0.0);
            if (opts.t_integrated) {
                result.cavity_correlation.assign(n_t, 0.0);
                result.dipole_correlation.assign(n_t, 0.0);
            }
        }
        for (std::size_t i = 0; i < n_t; ++i) {
            result.population[i] += weight * trajectory[i].head(static_cast<Eigen::Index>(B)).squaredNorm();
        }
        for (std::size_t n = 0; n < B; ++n) {
            const auto row = static_cast<Eigen::Index>(n);
            const cdouble a0 = trajectory[0](row);
            if (a0 == 0.0) continue;
            for (std::size_t j = 0; j < n_t; ++j) {
                result.dipole_t0[j] += weight * std::polar(1.0, -energy[n] * opts.dt * static_cast<double>(j)) * a0 *
                                       std::conj(trajectory[j](row));
            }
        }
        if (!opts.t_integrated) continue;

        const std::size_t N = [&] {
            std::size_t p = 1;
            while (p < 2 * n_t) p <<= 1;
            return p;
        }();
        std::vector<cdouble> buf(N), spec, back;
        for (int block = 0; block < 2; ++block) {
            std::vector<cdouble>& target = block == 0 ? result.dipole_correlation : result.cavity_correlation;
            for (std::size_t n = 0; n < B; ++n) {
                const auto row = static_cast<Eigen::Index>(block == 0 ? n : B + n);
                double mass = 0.0;
                for (std::size_t i = 0; i < n_t; ++i) mass += std::norm(trajectory[i](row));
                if (mass < 1e-24) continue;
                std::fill(buf.begin(), buf.end(), 0.0);
                for (std::size_t i = 0; i < n_t; ++i) buf[i] = trajectory[i](row);
                fft.fwd(spec, buf);
                for (auto& c : spec) c = std::norm(c);
                fft.inv(back, spec);
                const cdouble a0 = trajectory[0](row);
                for (std::size_t j = 0; j < n_t; ++j) {
                    // sum_i w_i a_i conj(a_{i+j}), trapezoid weight 1/2 at i = 0
                    const cdouble c = std::conj(back[j]) - 0.5 * a0 * std::conj(trajectory[j](row));
                    target[j] += weight * opts.dt * std::polar(1.0, -energy[n] * opts.dt * static_cast<double>(j)) * c;
                }
            }
        }
    }

    result.grid = TimeGrid{opts.dt * static_cast<double>(n_t - 1), n_t};
    if (opts.t_integrated) {
        result.cavity_spectrum = assemble_spectrum(result.cavity_correlation, opts.dt, s.kappa, spectrum);
        result.dipole_spectrum = assemble_spectrum(result.dipole_correlation, opts.dt, 1.0, spectrum);
        if (spectrum.green_function && s.kappa > 0.0) {
            for (std::size_t k = 0; k < result.dipole_spectrum.omega.size(); ++k) {
                result.dipole_spectrum.S[k] *= cavity_green_function(result.dipole_spectrum.omega[k], s);
            }
        }
        for (Spectrum* sp : {&result.cavity_spectrum, &result.dipole_spectrum}) {
            sp->method = "oracle";
            sp->frame = "lab";
            sp->t_max = result.grid.t_max;
            sp->params = {{"omega_eg", s.omega_eg}, {"omega_c", s.omega_c},       {"g", s.g},
                          {"kappa", s.kappa},       {"temperature", temperature}, {"modes", static_cast<double>(M)},
                          {"fock_cutoff", static_cast<double>(cutoff)},           {"max_total", static_cast<double>(cap)},
                          {"omega_bar", s.mean_frequency()}};
        }
        result.cavity_spectrum.route = "cavity";
        result.dipole_spectrum.route = "dipole";
    }
    return result;
}

OracleResult converged_oracle(const SystemParams& s, const BathParams& p, const OracleRefinement& base,
                              const OracleOptions& opts, const SpectrumOptions& spectrum, double tolerance)
{
    const double nu_max = base.nu_max > 0.0 ? base.nu_max : 4.0 * p.nu_c;
    OracleResult result =
        exact_evolve(s, discretize_bath(p, base.M, nu_max, base.fock_cutoff, base.max_total), p.temperature, opts, spectrum);
    OracleOptions fixed = opts;
    fixed.t_max = result.grid.t_max;

    ConvergenceReport& rep = result.report;
    rep.checked = true;
    try {
        const int cap = base.max_total < 0 ? -1 : 2 * base.max_total;
        const OracleResult finer = exact_evolve(s, discretize_bath(p, base.M, nu_max, 2 * base.fock_cutoff, cap),
                                                p.temperature, fixed, spectrum);
        const auto more_modes = static_cast<std::size_t>(std::ceil(1.5 * static_cast<double>(base.M)));
        const OracleResult wider = exact_evolve(
            s, discretize_bath(p, more_modes, nu_max, base.fock_cutoff, base.max_total), p.temperature, fixed, spectrum);
        if (opts.t_integrated) {
            rep.cutoff_change = relative_l2(finer.cavity_spectrum.S, result.cavity_spectrum.S);
            rep.modes_change = relative_l2(wider.cavity_spectrum.S, result.cavity_spectrum.S);
        }
        rep.cutoff_change = std::max(rep.cutoff_change, relative_l2(finer.population, result.population));
        rep.modes_change = std::max(rep.modes_change, relative_l2(wider.population, result.population));
        rep.converged = rep.cutoff_change < tolerance && rep.modes_change < tolerance;
        rep.detail = "cutoff x2 change " + std::to_string(rep.cutoff_change) + ", modes x1.5 change " +
                     std::to_string(rep.modes_change);
    } catch (const ConfigError& e) {
        rep.converged = false;
        rep.detail = std::string("refinement not possible: ") + e.what();
    }
    return result;
}

} // namespace pcqed
