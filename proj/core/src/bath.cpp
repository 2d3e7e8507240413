// bath.cpp — Bath integrals on composite Gauss-Legendre rules and the variational fixed point

#include "pcqed/bath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "pcqed/errors.hpp"

namespace pcqed {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// n(n-1) with the printed n = 1/(1 - e^{-x}); equals e^{-x}/(1 - e^{-x})^2.
double thermal_pair_factor(double x)
{
    if (!std::isfinite(x)) return 0.0;
    const double em = -std::expm1(-x);   // 1 - e^{-x}
    return std::exp(-x) / (em * em);
}

// Grid that resolves cos(nu tau) up to tau for the given base rule.
QuadratureGrid resolving_grid(const QuadratureGrid& grid, double tau)
{
    const double phase_per_panel = grid.nu_max * tau / static_cast<double>(std::max<std::size_t>(grid.panels, 1));
    if (grid.panels == 0 || phase_per_panel <= 6.0) return grid;
    return QuadratureGrid::for_time_window(grid, tau, grid.order);
}

// Per-node weights of the three kernel families for profile F.
struct NodeWeights {
    std::vector<double> nu, coth, phi, zz, yz;
};

NodeWeights node_weights(const VariationalProfile& F, const BathParams& p, const QuadratureGrid& grid)
{
    NodeWeights w;
    const std::size_t n = grid.size();
    w.nu = grid.nodes;
    w.coth.resize(n);
    w.phi.resize(n);
    w.zz.resize(n);
    w.yz.resize(n);
    double B = F.B;
    for (std::size_t k = 0; k < n; ++k) {
        const double nu = grid.nodes[k];
        const double J = spectral_density(nu, p) * grid.weights[k];
        const double f = F(nu);
        w.coth[k] = thermal_coth(nu, p.temperature);
        w.phi[k] = J * f * f / (nu * nu);
        w.zz[k] = J * (1.0 - f) * (1.0 - f);
        w.yz[k] = -B * J * f * (1.0 - f) / nu;
    }
    return w;
}

KernelSamples evaluate_samples(double tau, const NodeWeights& w)
{
    KernelSamples out{};
    double phi_re = 0.0, phi_im = 0.0, zz_re = 0.0, zz_im = 0.0, yz_re = 0.0, yz_im = 0.0;
    for (std::size_t k = 0; k < w.nu.size(); ++k) {
        const double c = std::cos(w.nu[k] * tau);
        const double s = std::sin(w.nu[k] * tau);
        phi_re += w.phi[k] * w.coth[k] * c;
        phi_im -= w.phi[k] * s;
        zz_re += w.zz[k] * w.coth[k] * c;
        zz_im -= w.zz[k] * s;
        yz_re += w.yz[k] * w.coth[k] * s;
        yz_im += w.yz[k] * c;
    }
    out.phi = {phi_re, phi_im};
    out.zz = {zz_re, zz_im};
    out.yz = {yz_re, yz_im};
    return out;
}

// Fills the kernel families on a uniform tau grid via per-node phase rotation.
void tabulate(const NodeWeights& w, const TauGrid& tau, std::vector<cdouble>* phi_out,
              std::vector<cdouble>* zz_out, std::vector<cdouble>* yz_out)
{
    const std::size_t n = w.nu.size();
    const std::size_t m = tau.count;
    if (phi_out) phi_out->assign(m, 0.0);
    if (zz_out) zz_out->assign(m, 0.0);
    if (yz_out) yz_out->assign(m, 0.0);

    std::vector<cdouble> rot(n), step(n);
    for (std::size_t k = 0; k < n; ++k) step[k] = std::polar(1.0, w.nu[k] * tau.dt);
    constexpr std::size_t reseed = 256;
    for (std::size_t j = 0; j < m; ++j) {
        const double t = tau.at(j);
        if (j % reseed == 0) {
            for (std::size_t k = 0; k < n; ++k) rot[k] = std::polar(1.0, w.nu[k] * t);
        }
        double phi_re = 0.0, phi_im = 0.0, zz_re = 0.0, zz_im = 0.0, yz_re = 0.0, yz_im = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double c = rot[k].real();
            const double s = rot[k].imag();
            const double cw = w.coth[k];
            phi_re += w.phi[k] * cw * c;
            phi_im -= w.phi[k] * s;
            zz_re += w.zz[k] * cw * c;
            zz_im -= w.zz[k] * s;
            yz_re += w.yz[k] * cw * s;
            yz_im += w.yz[k] * c;
            rot[k] *= step[k];
        }
        if (phi_out) (*phi_out)[j] = {phi_re, phi_im};
        if (zz_out) (*zz_out)[j] = {zz_re, zz_im};
        if (yz_out) (*yz_out)[j] = {yz_re, yz_im};
    }
}

double abs_scale(const NodeWeights& w)
{
    double s = 0.0;
    for (std::size_t k = 0; k < w.nu.size(); ++k) {
        s += (std::abs(w.phi[k]) + std::abs(w.zz[k])) * w.coth[k] + std::abs(w.yz[k]) * w.coth[k];
    }
    return s;
}

// Compares pointwise kernels against the doubled rule; throws on disagreement.
KernelSamples converged_samples(double tau, const VariationalProfile& F, const BathParams& p,
                                const QuadratureGrid& grid)
{
    const QuadratureGrid g1 = resolving_grid(grid, tau);
    const NodeWeights w1 = node_weights(F, p, g1);
    const KernelSamples a = evaluate_samples(tau, w1);
    const NodeWeights w2 = node_weights(F, p, g1.refined());
    const KernelSamples b = evaluate_samples(tau, w2);
    const double scale = std::max(abs_scale(w1), std::numeric_limits<double>::min());
    const double diff = std::max({std::abs(a.phi - b.phi), std::abs(a.zz - b.zz), std::abs(a.yz - b.yz)});
    if (diff > 1e-9 * scale) {
        throw NumericalError("bath quadrature not converged under node doubling", diff / scale);
    }
    return b;
}

} // namespace

void BathParams::validate() const
{
    if (!(alpha >= 0.0)) throw ConfigError("bath.alpha must be >= 0");
    if (!(nu_c > 0.0)) throw ConfigError("bath.nu_c must be > 0");
    if (!(mu >= 0.0)) throw ConfigError("bath.mu must be >= 0");
    if (!(temperature >= 0.0)) throw ConfigError("bath.temperature must be >= 0");
}

void gauss_legendre_unit(std::size_t n, std::vector<double>& x, std::vector<double>& w)
{
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * static_cast<double>(j) - 1.0) * z * p1 - (static_cast<double>(j) - 1.0) * p2)
                     / static_cast<double>(j);
            }
            dp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

QuadratureGrid QuadratureGrid::gauss_legendre(double nu_max, std::size_t panels, std::size_t order)
{
    if (!(nu_max > 0.0) || panels == 0 || order == 0) {
        throw ConfigError("quadrature grid needs nu_max > 0, panels > 0, order > 0");
    }
    std::vector<double> x, w;
    gauss_legendre_unit(order, x, w);
    QuadratureGrid grid;
    grid.nu_max = nu_max;
    grid.panels = panels;
    grid.order = order;
    grid.nodes.reserve(panels * order);
    grid.weights.reserve(panels * order);
    const double h = nu_max / static_cast<double>(panels);
    for (std::size_t pnl = 0; pnl < panels; ++pnl) {
        const double a = h * static_cast<double>(pnl);
        for (std::size_t i = 0; i < order; ++i) {
            grid.nodes.push_back(a + 0.5 * h * (x[i] + 1.0));
            grid.weights.push_back(0.5 * h * w[i]);
        }
    }
    return grid;
}

QuadratureGrid QuadratureGrid::standard(const BathParams& p, std::size_t nodes, double nu_max_factor)
{
    if (nu_max_factor < 5.0) throw ConfigError("nu_max must be at least 5 nu_c");
    const std::size_t order = 20;
    const std::size_t panels = std::max<std::size_t>(1, (nodes + order - 1) / order);
    return gauss_legendre(nu_max_factor * p.nu_c, panels, order);
}

QuadratureGrid QuadratureGrid::for_time_window(const QuadratureGrid& base, double tau_max, std::size_t order)
{
    const auto needed = static_cast<std::size_t>(std::ceil(base.nu_max * tau_max / 6.0));
    return gauss_legendre(base.nu_max, std::max(base.panels, needed), order);
}

QuadratureGrid QuadratureGrid::refined() const
{
    return gauss_legendre(nu_max, 2 * panels, order);
}

double spectral_density(double nu, const BathParams& p)
{
    if (nu < 0.0) throw DomainError("spectral_density: nu must be >= 0");
    const double x = nu / p.nu_c;
    return p.alpha * nu * nu * nu * std::exp(-x * x);
}

double beta_hbar(double temperature)
{
    if (temperature < 0.0) throw DomainError("temperature must be >= 0");
    return temperature == 0.0 ? kInf : kHbarOverKb / temperature;
}

double thermal_coth(double nu, double temperature)
{
    if (!(nu > 0.0)) throw DomainError("thermal_coth: nu must be > 0");
    if (temperature == 0.0) return 1.0;
    return 1.0 / std::tanh(0.5 * beta_hbar(temperature) * nu);
}

double dephasing_rate(const BathParams& p, const QuadratureGrid& grid, DephasingConvention convention,
                      double rel_tol)
{
    if (p.temperature == 0.0 || p.mu == 0.0 || p.alpha == 0.0) return 0.0;
    const double beta = beta_hbar(p.temperature);
    auto integrate = [&](const QuadratureGrid& q) {
        double sum = 0.0;
        for (std::size_t k = 0; k < q.size(); ++k) {
            const double nu = q.nodes[k];
            const double cutoff = convention == DephasingConvention::as_printed
                                      ? std::exp(-2.0 * nu * nu / p.nu_c)
                                      : std::exp(-2.0 * nu * nu / (p.nu_c * p.nu_c));
            sum += q.weights[k] * std::pow(nu, 10) * cutoff * thermal_pair_factor(beta * nu);
        }
        return p.alpha * p.mu / std::pow(p.nu_c, 4) * sum;
    };
    const double a = integrate(grid);
    const double b = integrate(grid.refined());
    if (std::abs(a - b) > rel_tol * std::abs(b)) {
        throw NumericalError("dephasing_rate: quadrature not converged", std::abs(a - b) / std::abs(b));
    }
    return b;
}

double polaron_shift(const BathParams& p, const QuadratureGrid& grid)
{
    double sum = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        sum += grid.weights[k] * spectral_density(grid.nodes[k], p) / grid.nodes[k];
    }
    return -sum;
}

VariationalProfile VariationalProfile::constant(double value, const BathParams& p, const QuadratureGrid& grid)
{
    if (value < 0.0 || value > 1.0) throw DomainError("constant profile must lie in [0, 1]");
    VariationalProfile F;
    F.kind_ = Kind::constant;
    F.constant_ = value;
    F.temperature_ = p.temperature;
    F.grid_ = grid;
    F.values_.assign(grid.size(), value);
    F.B = b_expectation(F.values_, p, grid);
    F.R = variational_shift(F.values_, p, grid);
    return F;
}

double VariationalProfile::operator()(double nu) const
{
    if (kind_ == Kind::constant) return constant_;
    if (coupling_ == 0.0) return 1.0;
    const double thermal = thermal_coth(nu, temperature_) / nu;
    return numerator_ / (numerator_ + coupling_ * thermal);
}

VariationalProfile make_variational_profile(double numerator, double coupling, double g, const BathParams& p,
                                            const QuadratureGrid& grid, double residual)
{
    VariationalProfile F;
    F.kind_ = VariationalProfile::Kind::variational;
    F.numerator_ = numerator;
    F.coupling_ = coupling;
    F.temperature_ = p.temperature;
    F.grid_ = grid;
    F.values_.resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) F.values_[k] = F(grid.nodes[k]);
    F.B = b_expectation(F.values_, p, grid);
    F.R = variational_shift(F.values_, p, grid);
    F.gV = F.B * g;
    F.residual = residual;
    return F;
}

double b_expectation(std::span<const double> F, const BathParams& p, const QuadratureGrid& grid)
{
    double sum = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double nu = grid.nodes[k];
        sum += grid.weights[k] * spectral_density(nu, p) * F[k] * F[k] / (nu * nu) * thermal_coth(nu, p.temperature);
    }
    return std::exp(-0.5 * sum);
}

double variational_shift(std::span<const double> F, const BathParams& p, const QuadratureGrid& grid)
{
    double sum = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double nu = grid.nodes[k];
        sum += grid.weights[k] * spectral_density(nu, p) / nu * F[k] * (F[k] - 2.0);
    }
    return sum;
}

double b_expectation(const VariationalProfile& F, const BathParams& p)
{
    return b_expectation(F.values(), p, F.grid());
}

double variational_shift(const VariationalProfile& F, const BathParams& p)
{
    return variational_shift(F.values(), p, F.grid());
}

VariationalProfile solve_variational(double delta, double g, const BathParams& p, const QuadratureGrid& grid,
                                     const VariationalOptions& opts)
{
    if (g < 0.0) throw DomainError("solve_variational: g must be >= 0");
    if (p.alpha == 0.0 || g == 0.0) {
        VariationalProfile F = VariationalProfile::constant(1.0, p, grid);
        F.gV = F.B * g;
        return F;
    }
    const double beta = beta_hbar(p.temperature);
    const std::size_t n = grid.size();
    std::vector<double> F(n, 1.0), rhs(n);
    double numerator = 1.0, coupling = 0.0, residual = kInf;

    auto update_scalars = [&](std::span<const double> values) {
        const double B = b_expectation(values, p, grid);
        const double R = variational_shift(values, p, grid);
        const double gV = B * g;
        const double d = delta + R;
        const double eta = std::sqrt(4.0 * gV * gV + d * d);
        const double th = std::isfinite(beta) ? std::tanh(0.5 * beta * eta) : 1.0;
        numerator = 1.0 - (eta > 0.0 ? d / eta : 0.0) * th;
        coupling = eta > 0.0 ? 2.0 * gV * gV * th / eta : 0.0;
    };
    auto fill_rhs = [&]() {
        for (std::size_t k = 0; k < n; ++k) {
            const double nu = grid.nodes[k];
            rhs[k] = coupling == 0.0 ? 1.0
                                     : numerator / (numerator + coupling * thermal_coth(nu, p.temperature) / nu);
        }
    };

    for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
        update_scalars(F);
        fill_rhs();
        residual = 0.0;
        for (std::size_t k = 0; k < n; ++k) residual = std::max(residual, std::abs(rhs[k] - F[k]));
        if (residual < opts.tolerance) {
            VariationalProfile out = make_variational_profile(numerator, coupling, g, p, grid, residual);
            out.iterations = it;
            return out;
        }
        for (std::size_t k = 0; k < n; ++k) F[k] = (1.0 - opts.damping) * F[k] + opts.damping * rhs[k];
    }
    throw NumericalError("solve_variational: fixed point did not converge", residual);
}

void CorrelationTable::set(Kernel i, Kernel j, std::vector<cdouble> values)
{
    if (values.size() != grid_.count) throw ConfigError("correlation table: sample count does not match tau grid");
    data_[index(i, j)] = std::move(values);
}

KernelSamples kernel_samples(double tau, const VariationalProfile& F, const BathParams& p, const QuadratureGrid& grid)
{
    if (tau < 0.0) throw DomainError("kernel samples need tau >= 0");
    return converged_samples(tau, F, p, grid);
}

cdouble weak_correlation(double tau, const BathParams& p, const QuadratureGrid& grid)
{
    return kernel_samples(tau, VariationalProfile::constant(0.0, p, grid), p, grid).zz;
}

cdouble phi(double tau, const VariationalProfile& F, const BathParams& p, const QuadratureGrid& grid)
{
    return kernel_samples(tau, F, p, grid).phi;
}

std::vector<cdouble> phi_series(const VariationalProfile& F, const BathParams& p, const QuadratureGrid& grid,
                                const TauGrid& tau)
{
    const QuadratureGrid q = resolving_grid(grid, tau.tau_max());
    std::vector<cdouble> out;
    tabulate(node_weights(F, p, q), tau, &out, nullptr, nullptr);
    return out;
}

TauGrid choose_tau_grid(const VariationalProfile& F, const BathParams& p, double bohr_max, const TauGridOptions& opts)
{
    TauGrid grid;
    grid.dt = opts.dt > 0.0 ? opts.dt : 0.1 / std::max(bohr_max, 3.0 * p.nu_c);
    double tau_max = opts.tau_max;
    if (tau_max <= 0.0) {
        // Kernels to check: C_ZZ, C_YZ directly, C_XX ~ phi^2/2 and C_YY ~ phi near decay.
        const KernelSamples at0 = kernel_samples(0.0, F, p, F.grid());
        const double B2 = F.B * F.B;
        auto magnitudes = [&](const KernelSamples& s) {
            const cdouble xx = 0.5 * B2 * (std::exp(s.phi) + std::exp(-s.phi) - 2.0);
            const cdouble yy = 0.5 * B2 * (std::exp(s.phi) - std::exp(-s.phi));
            return std::array<double, 4>{std::abs(xx), std::abs(yy), std::abs(s.zz), std::abs(s.yz)};
        };
        const auto ref = magnitudes(at0);
        double ref_max = 0.0;
        for (double r : ref) ref_max = std::max(ref_max, r);
        tau_max = 20.0 / p.nu_c;
        for (;;) {
            if (ref_max == 0.0) break;
            bool decayed = true;
            // Probe the tail over its last quarter so oscillation zeros do not fool the check.
            for (double frac : {0.75, 0.875, 1.0}) {
                const auto cur = magnitudes(kernel_samples(frac * tau_max, F, p, F.grid()));
                for (std::size_t c = 0; c < cur.size(); ++c) {
                    if (ref[c] > 0.0 && cur[c] > opts.decay_tol * ref[c]) decayed = false;
                }
            }
            if (decayed) break;
            if (tau_max * 2.0 > opts.tau_cap) {
                throw TruncationError("bath kernels do not decay within the tau cap", tau_max);
            }
            tau_max *= 2.0;
        }
    }
    auto count = static_cast<std::size_t>(std::ceil(tau_max / grid.dt)) + 1;
    if (count % 2 == 0) ++count;
    grid.count = std::max<std::size_t>(count, 3);
    return grid;
}

CorrelationTable correlation_table(const VariationalProfile& F, const BathParams& p, const TauGrid& tau)
{
    if (tau.count < 3 || !(tau.dt > 0.0)) throw ConfigError("correlation_table: tau grid needs dt > 0 and >= 3 points");
    CorrelationTable table(tau);
    for (Kernel k : {Kernel::X, Kernel::Y, Kernel::Z}) table.declare(k);
    const bool weak_limit = F.is_constant() && F.constant_value() == 0.0;
    const bool polaron_limit = F.is_constant() && F.constant_value() == 1.0;
    if (p.alpha == 0.0) return table;

    const QuadratureGrid q = resolving_grid(F.grid(), tau.tau_max());
    const NodeWeights w = node_weights(F, p, q);
    std::vector<cdouble> ph, zz, yz;
    tabulate(w, tau, weak_limit ? nullptr : &ph, polaron_limit ? nullptr : &zz,
             (weak_limit || polaron_limit) ? nullptr : &yz);

    if (!weak_limit) {
        const double B2 = F.B * F.B;
        std::vector<cdouble> xx(tau.count), yy(tau.count);
        for (std::size_t j = 0; j < tau.count; ++j) {
            const cdouble ep = std::exp(ph[j]);
            const cdouble em = std::exp(-ph[j]);
            xx[j] = 0.5 * B2 * (ep + em - 2.0);
            yy[j] = 0.5 * B2 * (ep - em);
        }
        table.set(Kernel::X, Kernel::X, std::move(xx));
        table.set(Kernel::Y, Kernel::Y, std::move(yy));
    }
    if (!polaron_limit) table.set(Kernel::Z, Kernel::Z, std::move(zz));
    if (!weak_limit && !polaron_limit) {
        std::vector<cdouble> zy(yz.size());
        for (std::size_t j = 0; j < yz.size(); ++j) zy[j] = -yz[j];
        table.set(Kernel::Y, Kernel::Z, std::move(yz));
        table.set(Kernel::Z, Kernel::Y, std::move(zy));
    }
    return table;
}

cdouble half_fourier(std::span<const cdouble> samples, double dt, double omega, double decay_tol)
{
    const std::size_t n = samples.size();
    if (n == 0) return 0.0;
    double peak = 0.0;
    for (const auto& c : samples) peak = std::max(peak, std::abs(c));
    if (peak == 0.0) return 0.0;
    const double tail = std::abs(samples[n - 1]) / peak;
    if (tail > decay_tol) throw TruncationError("half_fourier: kernel has not decayed at tau_max", tail);
    if (n < 3 || n % 2 == 0) throw ConfigError("half_fourier: Simpson needs an odd number (>= 3) of samples");

    const cdouble step = std::polar(1.0, -omega * dt);
    cdouble rot = 1.0;
    cdouble sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j % 256 == 0) rot = std::polar(1.0, -omega * dt * static_cast<double>(j));
        const double wj = (j == 0 || j == n - 1) ? 1.0 : (j % 2 == 1 ? 4.0 : 2.0);
        sum += wj * samples[j] * rot;
        rot *= step;
    }
    return sum * (dt / 3.0);
}

cdouble half_fourier(const CorrelationTable& table, Kernel i, Kernel j, double omega, double decay_tol)
{
    if (!table.has(i, j)) return 0.0;
    return half_fourier(table.at(i, j), table.tau_grid().dt, omega, decay_tol);
}

} // namespace pcqed
