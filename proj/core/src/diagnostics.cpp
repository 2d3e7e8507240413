// diagnostics.cpp — Spectral errors, perturbation strength, free-energy bounds, peak extraction

#include "pcqed/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <unsupported/Eigen/LevenbergMarquardt>
#include <unsupported/Eigen/NumericalDiff>

#include "pcqed/errors.hpp"

namespace pcqed {

namespace {

double interpolate(const Spectrum& S, double omega)
{
    const auto& x = S.omega;
    if (x.empty()) return 0.0;
    if (omega <= x.front()) return omega == x.front() ? S.S.front() : 0.0;
    if (omega >= x.back()) return omega == x.back() ? S.S.back() : 0.0;
    const auto it = std::upper_bound(x.begin(), x.end(), omega);
    const auto k = static_cast<std::size_t>(it - x.begin());
    const double t = (omega - x[k - 1]) / (x[k] - x[k - 1]);
    return (1.0 - t) * S.S[k - 1] + t * S.S[k];
}

// Trapezoid integral of f(omega_k) over the points of grid with |omega| <= window.
template <class F>
double integrate(const std::vector<double>& grid, double window, F f)
{
    double sum = 0.0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (std::abs(grid[k - 1]) > window || std::abs(grid[k]) > window) continue;
        sum += 0.5 * (grid[k] - grid[k - 1]) * (f(k - 1) + f(k));
    }
    return sum;
}

double l2_norm(const Spectrum& S, double window)
{
    return std::sqrt(integrate(S.omega, window, [&](std::size_t k) { return S.S[k] * S.S[k]; }));
}

void require_grid(const Spectrum& S, const char* who)
{
    if (S.omega.size() < 2 || S.omega.size() != S.S.size()) {
        throw ConfigError(std::string(who) + ": spectrum needs >= 2 points on a matching grid");
    }
}

PeakPair order_peaks(std::array<double, 2> c, std::array<double, 2> w, std::array<double, 2> a,
                     std::array<double, 2> h)
{
    const int hi = c[0] >= c[1] ? 0 : 1;
    const int lo = 1 - hi;
    PeakPair p;
    p.S_plus = c[hi];
    p.S_minus = c[lo];
    p.width_plus = w[hi];
    p.width_minus = w[lo];
    p.weight_plus = a[hi];
    p.weight_minus = a[lo];
    p.height_plus = h[hi];
    p.height_minus = h[lo];
    if (!(p.S_plus > p.S_minus)) throw DegeneratePeaksError("peak centres coincide", 0.0);
    return p;
}

struct PairResidual : Eigen::DenseFunctor<double> {
    const std::vector<double>* omega{nullptr};
    const std::vector<double>* value{nullptr};

    PairResidual(const std::vector<double>& w, const std::vector<double>& v)
        : Eigen::DenseFunctor<double>(8, static_cast<int>(w.size())), omega(&w), value(&v)
    {
    }

    static LorentzianModel unpack(const InputType& x)
    {
        LorentzianModel m;
        for (int p = 0; p < 2; ++p) {
            m.centre[p] = x(4 * p);
            m.width[p] = std::abs(x(4 * p + 1));
            m.absorptive[p] = x(4 * p + 2);
            m.dispersive[p] = x(4 * p + 3);
        }
        return m;
    }

    int operator()(const InputType& x, ValueType& f) const
    {
        const LorentzianModel m = unpack(x);
        for (std::size_t k = 0; k < omega->size(); ++k) {
            f(static_cast<Eigen::Index>(k)) = m((*omega)[k]) - (*value)[k];
        }
        return 0;
    }
};

} // namespace

double relative_error(const Spectrum& ref, const Spectrum& S, double window)
{
    require_grid(ref, "relative_error");
    const double denom = l2_norm(ref, window);
    if (!(denom > 0.0)) throw NumericalError("relative_error: reference spectrum has zero norm", 0.0);
    const double num = integrate(ref.omega, window, [&](std::size_t k) {
        const double d = ref.S[k] - interpolate(S, ref.omega[k]);
        return d * d;
    });
    return std::sqrt(num) / denom;
}

double normalized_relative_error(const Spectrum& ref, const Spectrum& S, double window)
{
    require_grid(ref, "normalized_relative_error");
    require_grid(S, "normalized_relative_error");
    const double nr = l2_norm(ref, window);
    const double ns = l2_norm(S, window);
    if (!(nr > 0.0) || !(ns > 0.0)) throw NumericalError("normalized_relative_error: zero-norm spectrum", 0.0);
    const double num = integrate(ref.omega, window, [&](std::size_t k) {
        const double d = ref.S[k] / nr - interpolate(S, ref.omega[k]) / ns;
        return d * d;
    });
    return std::sqrt(num);
}

double LorentzianModel::operator()(double omega) const
{
    double s = 0.0;
    for (int p = 0; p < 2; ++p) {
        const double x = omega - centre[p];
        s += (absorptive[p] * width[p] + dispersive[p] * x) / (x * x + width[p] * width[p]);
    }
    return s;
}

PeakPair extract_peaks(const Liouvillian& L, Route route)
{
    const Eigendecomposition& e = L.eig();
    const Operator O = route == Route::cavity ? ops::cavity() : ops::sigma();
    const double t_max = decay_time(L, 1e-10, 400.0, nullptr);
    const VecState M = vec(O * unvec(L.integrated_action(vec(initial_exciton_state()), t_max)));
    const Operator Odag = O.adjoint();

    std::vector<std::pair<double, Eigen::Index>> modes;
    double total = 0.0;
    for (Eigen::Index k = 0; k < e.values.size(); ++k) {
        const VecState r = e.right.col(k);
        const cdouble c = (Odag * unvec(r)).trace() * (e.left.row(k) * M)(0);
        modes.emplace_back(std::abs(c), k);
        total += std::abs(c);
    }
    std::sort(modes.begin(), modes.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    if (modes.size() < 2 || !(total > 0.0) || modes[1].first < 1e-6 * modes[0].first) {
        throw DegeneratePeaksError("fewer than two resolvable Liouvillian modes", modes.size() > 1 ? modes[1].first : 0.0);
    }
    std::array<double, 2> c{}, w{}, a{}, h{};
    for (int p = 0; p < 2; ++p) {
        const cdouble lambda = e.values(modes[p].second);
        c[p] = lambda.imag();
        w[p] = -lambda.real();
        a[p] = modes[p].first / total;
        h[p] = w[p] > 0.0 ? modes[p].first / w[p] : std::numeric_limits<double>::infinity();
    }
    return order_peaks(c, w, a, h);
}

std::vector<std::size_t> local_maxima(const Spectrum& S, double lo, double hi)
{
    std::vector<std::size_t> out;
    for (std::size_t k = 1; k + 1 < S.S.size(); ++k) {
        if (S.omega[k] <= lo || S.omega[k] >= hi) continue;
        if (S.S[k] > S.S[k - 1] && S.S[k] >= S.S[k + 1]) out.push_back(k);
    }
    return out;
}

LorentzianModel fit_lorentzian_pair(const Spectrum& S)
{
    require_grid(S, "fit_lorentzian_pair");
    std::vector<std::size_t> maxima = local_maxima(S, -std::numeric_limits<double>::infinity(),
                                                   std::numeric_limits<double>::infinity());
    if (maxima.size() < 2) throw DegeneratePeaksError("fewer than two local maxima in the spectrum", 0.0);
    std::partial_sort(maxima.begin(), maxima.begin() + 2, maxima.end(),
                      [&](std::size_t a, std::size_t b) { return S.S[a] > S.S[b]; });

    const double h = S.step();
    Eigen::VectorXd x(8);
    std::array<double, 2> half{};
    for (int p = 0; p < 2; ++p) {
        const std::size_t k = maxima[p];
        const double curvature = (S.S[k + 1] - 2.0 * S.S[k] + S.S[k - 1]) / (h * h);
        double gamma = curvature < 0.0 ? std::sqrt(-2.0 * S.S[k] / curvature) : 10.0 * h;
        gamma = std::clamp(gamma, h, 10.0);
        half[p] = gamma;
        x(4 * p) = S.omega[k];
        x(4 * p + 1) = gamma;
        x(4 * p + 2) = S.S[k] * gamma;
        x(4 * p + 3) = 0.0;
    }

    std::vector<double> w, v;
    for (std::size_t k = 0; k < S.omega.size(); ++k) {
        bool inside = false;
        for (int p = 0; p < 2; ++p) {
            const double reach = std::max(3.0 * half[p], 5.0 * h);
            inside = inside || std::abs(S.omega[k] - x(4 * p)) <= reach;
        }
        if (inside) {
            w.push_back(S.omega[k]);
            v.push_back(S.S[k]);
        }
    }
    if (w.size() < 8) throw DegeneratePeaksError("too few points around the spectral maxima", 0.0);

    PairResidual residual(w, v);
    Eigen::NumericalDiff<PairResidual> functor(residual);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<PairResidual>> lm(functor);
    lm.setXtol(1e-12);
    lm.setFtol(1e-12);
    lm.setMaxfev(4000);
    lm.minimize(x);
    const LorentzianModel m = PairResidual::unpack(x);
    if (!std::isfinite(m.centre[0]) || !std::isfinite(m.centre[1])) {
        throw NumericalError("Lorentzian fit diverged", 0.0);
    }
    return m;
}

PeakPair extract_peaks(const Spectrum& S)
{
    const LorentzianModel m = fit_lorentzian_pair(S);
    std::array<double, 2> c{}, w{}, a{}, h{};
    double total = 0.0;
    for (int p = 0; p < 2; ++p) total += std::abs(m.absorptive[p]);
    for (int p = 0; p < 2; ++p) {
        c[p] = m.centre[p];
        w[p] = m.width[p];
        a[p] = total > 0.0 ? std::abs(m.absorptive[p]) / total : 0.0;
        h[p] = interpolate(S, m.centre[p]);
    }
    return order_peaks(c, w, a, h);
}

double sideband_fraction(const Spectrum& S, const LorentzianModel& model)
{
    require_grid(S, "sideband_fraction");
    const double inf = std::numeric_limits<double>::infinity();
    const double total = integrate(S.omega, inf, [&](std::size_t k) { return S.S[k]; });
    if (!(total > 0.0)) throw NumericalError("sideband_fraction: spectrum has no positive weight", total);
    const auto outside = [&](double omega) {
        for (int p = 0; p < 2; ++p) {
            if (std::abs(omega - model.centre[p]) <= 3.0 * model.width[p]) return false;
        }
        return true;
    };
    const double side = integrate(S.omega, inf, [&](std::size_t k) {
        return outside(S.omega[k]) ? std::abs(S.S[k] - model(S.omega[k])) : 0.0;
    });
    return side / total;
}

ShiftRenormalization shift_and_renormalization(const PeakPair& peaks, double g)
{
    if (!(g > 0.0)) throw ConfigError("shift_and_renormalization: g must be > 0");
    const double diff = peaks.S_plus - peaks.S_minus;
    const double sum = peaks.S_plus + peaks.S_minus;
    const double radicand = diff * diff - sum * sum;
    if (radicand < 0.0) {
        throw NumericalError("imaginary coupling renormalization: peaks are mis-identified", radicand);
    }
    return {sum, std::sqrt(radicand) / (2.0 * g)};
}

double perturbation_strength(const MasterEquationSpec& spec)
{
    if (spec.bath.alpha == 0.0 || spec.channels.empty() || !spec.table) return 0.0;
    double num = 0.0;
    double den = 0.0;
    for (const auto& ci : spec.channels) {
        const double ni = ci.A.operatorNorm();
        for (const auto& cj : spec.channels) {
            if (!spec.table->has(ci.kernel, cj.kernel)) continue;
            const double weight = ni * cj.A.operatorNorm();
            const double c0 = std::abs(spec.table->at(ci.kernel, cj.kernel).front());
            num += weight * weight * c0 * c0;
            den += weight * c0;
        }
    }
    if (den == 0.0) return 0.0;
    const double nc2 = spec.bath.nu_c * spec.bath.nu_c;
    return num / (nc2 * den);
}

double bogoliubov_bound(const MasterEquationSpec& spec)
{
    const Eigen::Matrix2cd block = spec.frame_hamiltonian.block<2, 2>(kX0, kX0);
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(block);
    const Eigen::Vector2d e = es.eigenvalues();
    const double emin = e.minCoeff();
    const double beta = beta_hbar(spec.bath.temperature);
    if (!std::isfinite(beta)) return emin;
    double sum = 0.0;
    for (int k = 0; k < 2; ++k) sum += std::exp(-beta * (e(k) - emin));
    return emin - std::log(sum) / beta;
}

} // namespace pcqed
