// bath.hpp — Phonon bath: spectral density, thermal factors, correlation kernels, variational displacement

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace pcqed {

using cdouble = std::complex<double>;

// hbar / k_B in K*ps, so that beta*hbar*nu = kHbarOverKb * nu / T for nu in rad/ps.
inline constexpr double kHbarOverKb = 7.638232577;

// Super-ohmic bath J(nu) = alpha nu^3 exp(-nu^2/nu_c^2) plus the pure-dephasing constant.
struct BathParams {
    double alpha{0.0251};      // ps^2
    double nu_c{2.23};         // rad/ps
    double mu{0.02284};        // ps^4
    double temperature{4.0};   // K

    void validate() const;
};

enum class DephasingConvention { as_printed, bose };

// Composite Gauss-Legendre rule on [0, nu_max].
struct QuadratureGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
    double nu_max{0.0};

    std::size_t size() const { return nodes.size(); }

    static QuadratureGrid gauss_legendre(double nu_max, std::size_t panels, std::size_t order = 20);
    // Default rule for a bath: 400 nodes on [0, nu_max_factor * nu_c].
    static QuadratureGrid standard(const BathParams& p, std::size_t nodes = 400, double nu_max_factor = 8.0);
    // Rule that also resolves cos(nu tau) for tau <= tau_max (at most ~6 rad of phase per panel).
    static QuadratureGrid for_time_window(const QuadratureGrid& base, double tau_max, std::size_t order = 20);
    // Same interval, twice the panels (used for convergence probes).
    QuadratureGrid refined() const;

    std::size_t panels{0};
    std::size_t order{0};
};

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre_unit(std::size_t n, std::vector<double>& x, std::vector<double>& w);

double spectral_density(double nu, const BathParams& p);
// coth(beta hbar nu / 2); exactly 1 at T = 0.
double thermal_coth(double nu, double temperature);
// beta hbar nu, +inf at T = 0.
double beta_hbar(double temperature);

double dephasing_rate(const BathParams& p, const QuadratureGrid& grid,
                      DephasingConvention convention = DephasingConvention::as_printed,
                      double rel_tol = 1e-6);
double polaron_shift(const BathParams& p, const QuadratureGrid& grid);

// Displacement profile F(nu) = f(nu)/g(nu). Either a constant (0: weak limit,
// 1: full polaron) or the closed form of the variational condition for fixed scalars.
class VariationalProfile {
public:
    static VariationalProfile constant(double value, const BathParams& p, const QuadratureGrid& grid);

    double operator()(double nu) const;
    const std::vector<double>& values() const { return values_; }
    const QuadratureGrid& grid() const { return grid_; }
    bool is_constant() const { return kind_ == Kind::constant; }
    double constant_value() const { return constant_; }

    double R{0.0};    // variational shift, rad/ps
    double B{1.0};    // <B>
    double gV{0.0};   // <B> g, rad/ps
    std::size_t iterations{0};
    double residual{0.0};

private:
    friend VariationalProfile make_variational_profile(double, double, double, const BathParams&,
                                                        const QuadratureGrid&, double);
    enum class Kind { constant, variational };
    Kind kind_{Kind::constant};
    double constant_{1.0};
    double numerator_{1.0};   // 1 - (delta/eta) tanh(beta eta/2)
    double coupling_{0.0};    // 2 gV^2 tanh(beta eta/2) / eta
    double temperature_{0.0};
    QuadratureGrid grid_;
    std::vector<double> values_;
};

double b_expectation(const VariationalProfile& F, const BathParams& p);
double variational_shift(const VariationalProfile& F, const BathParams& p);
double b_expectation(std::span<const double> F, const BathParams& p, const QuadratureGrid& grid);
double variational_shift(std::span<const double> F, const BathParams& p, const QuadratureGrid& grid);

struct VariationalOptions {
    double damping{0.5};
    double tolerance{1e-10};
    std::size_t max_iterations{500};
};

// Self-consistent profile for detuning delta = omega_eg - omega_c and coupling g.
VariationalProfile solve_variational(double delta, double g, const BathParams& p,
                                     const QuadratureGrid& grid, const VariationalOptions& opts = {});

// Bath operator families appearing in the transformed interaction.
enum class Kernel { X, Y, Z };

// Uniform tau grid starting at 0 with an odd number of points (Simpson-ready).
struct TauGrid {
    double dt{0.01};
    std::size_t count{1};
    double tau_max() const { return dt * static_cast<double>(count - 1); }
    double at(std::size_t j) const { return dt * static_cast<double>(j); }
};

// Sampled bath kernels of one frame. A family is declared when the table describes it;
// undeclared families are an error to couple to, absent pairs of declared families are zero.
class CorrelationTable {
public:
    CorrelationTable() = default;
    explicit CorrelationTable(TauGrid grid) : grid_(grid) {}

    const TauGrid& tau_grid() const { return grid_; }
    bool has(Kernel i, Kernel j) const { return !data_[index(i, j)].empty(); }
    const std::vector<cdouble>& at(Kernel i, Kernel j) const { return data_[index(i, j)]; }
    void set(Kernel i, Kernel j, std::vector<cdouble> values);
    void declare(Kernel k) { declared_[static_cast<std::size_t>(k)] = true; }
    bool declares(Kernel k) const { return declared_[static_cast<std::size_t>(k)]; }

private:
    static std::size_t index(Kernel i, Kernel j) { return 3 * static_cast<std::size_t>(i) + static_cast<std::size_t>(j); }
    TauGrid grid_;
    std::array<std::vector<cdouble>, 9> data_;
    std::array<bool, 3> declared_{};
};

struct KernelSamples {
    cdouble phi, zz, yz;   // phi(tau), C_ZZ(tau), C_YZ(tau)
};

// Pointwise kernels for a profile (nodes taken from grid, F evaluated there).
KernelSamples kernel_samples(double tau, const VariationalProfile& F, const BathParams& p,
                             const QuadratureGrid& grid);
cdouble weak_correlation(double tau, const BathParams& p, const QuadratureGrid& grid);
cdouble phi(double tau, const VariationalProfile& F, const BathParams& p, const QuadratureGrid& grid);

// phi(tau_j) on a uniform grid (rotation recurrence over nodes).
std::vector<cdouble> phi_series(const VariationalProfile& F, const BathParams& p,
                                const QuadratureGrid& grid, const TauGrid& tau);

struct TauGridOptions {
    double dt{0.0};             // 0: automatic from bohr_max and nu_c
    double tau_max{0.0};        // 0: automatic from decay_tol
    double decay_tol{1e-4};
    double tau_cap{2048.0};
};

// Chooses dt and tau_max for the kernels of profile F.
TauGrid choose_tau_grid(const VariationalProfile& F, const BathParams& p, double bohr_max,
                        const TauGridOptions& opts = {});

CorrelationTable correlation_table(const VariationalProfile& F, const BathParams& p, const TauGrid& tau);

// int_0^tau_max C(tau) e^{-i omega tau} dtau by composite Simpson.
cdouble half_fourier(std::span<const cdouble> samples, double dt, double omega, double decay_tol = 1e-4);
cdouble half_fourier(const CorrelationTable& table, Kernel i, Kernel j, double omega, double decay_tol = 1e-4);

} // namespace pcqed
