// system.cpp — Operators, superoperator builders and the cached Liouvillian

#include "pcqed/system.hpp"

#include <cmath>
#include <mutex>

#include <unsupported/Eigen/MatrixFunctions>

#include "pcqed/errors.hpp"

namespace pcqed {

void SystemParams::validate() const
{
    if (!(g >= 0.0)) throw ConfigError("system.g must be >= 0");
    if (!(kappa >= 0.0)) throw ConfigError("system.kappa must be >= 0");
    if (!std::isfinite(omega_eg) || !std::isfinite(omega_c)) throw ConfigError("system frequencies must be finite");
}

std::string to_string(Frame f)
{
    switch (f) {
    case Frame::lab: return "lab";
    case Frame::polaron: return "polaron";
    case Frame::variational: return "variational";
    case Frame::polariton_polaron: return "polariton-polaron";
    }
    return "unknown";
}

namespace ops {

Operator identity() { return Operator::Identity(); }

Operator ket_bra(int i, int j)
{
    Operator op = Operator::Zero();
    op(i, j) = 1.0;
    return op;
}

Operator sigma() { return ket_bra(kG0, kX0); }
Operator cavity() { return ket_bra(kG0, kG1); }
Operator projector(int i) { return ket_bra(i, i); }
Operator excited_manifold() { return ket_bra(kX0, kX0) + ket_bra(kG1, kG1); }

} // namespace ops

VecState vec(const Operator& rho)
{
    return Eigen::Map<const VecState>(rho.data());
}

Operator unvec(const VecState& v)
{
    return Eigen::Map<const Operator>(v.data());
}

namespace {

SuperOperator kron(const Operator& A, const Operator& B)
{
    SuperOperator out;
    for (int i = 0; i < kDim; ++i) {
        for (int j = 0; j < kDim; ++j) {
            out.block<kDim, kDim>(i * kDim, j * kDim) = A(i, j) * B;
        }
    }
    return out;
}

} // namespace

SuperOperator left_multiply(const Operator& A) { return kron(Operator::Identity(), A); }
SuperOperator right_multiply(const Operator& B) { return kron(B.transpose(), Operator::Identity()); }

SuperOperator commutator_generator(const Operator& H)
{
    const cdouble i(0.0, 1.0);
    return -i * (left_multiply(H) - right_multiply(H));
}

SuperOperator lindblad_dissipator(const Operator& A)
{
    const Operator AdA = A.adjoint() * A;
    return left_multiply(A) * right_multiply(A.adjoint()) - 0.5 * right_multiply(AdA) - 0.5 * left_multiply(AdA);
}

Operator jc_hamiltonian(double delta, double g, double shift)
{
    Operator H = Operator::Zero();
    H(kX0, kX0) = 0.5 * delta + shift;
    H(kG1, kG1) = -0.5 * delta;
    H(kX0, kG1) = g;
    H(kG1, kX0) = g;
    return H;
}

Operator hamiltonian_lab(const SystemParams& s)
{
    Operator H = Operator::Zero();
    H(kX0, kX0) = s.omega_eg;
    H(kG1, kG1) = s.omega_c;
    H(kX0, kG1) = s.g;
    H(kG1, kX0) = s.g;
    return H;
}

Operator hamiltonian_rotating(const SystemParams& s) { return jc_hamiltonian(s.delta(), s.g); }

Eigen::Vector3cd PolaritonBasis::ket_plus() const
{
    Eigen::Vector3cd v = Eigen::Vector3cd::Zero();
    v(kX0) = C_plus;
    v(kG1) = C_minus;
    return v;
}

Eigen::Vector3cd PolaritonBasis::ket_minus() const
{
    Eigen::Vector3cd v = Eigen::Vector3cd::Zero();
    v(kX0) = C_minus;
    v(kG1) = -C_plus;
    return v;
}

Operator PolaritonBasis::p() const
{
    Eigen::Vector3cd g0 = Eigen::Vector3cd::Zero();
    g0(kG0) = 1.0;
    return g0 * ket_plus().adjoint();
}

Operator PolaritonBasis::m() const
{
    Eigen::Vector3cd g0 = Eigen::Vector3cd::Zero();
    g0(kG0) = 1.0;
    return g0 * ket_minus().adjoint();
}

PolaritonBasis polariton_basis(const SystemParams& s)
{
    const double d = s.delta();
    const double root = std::sqrt(d * d + 4.0 * s.g * s.g);
    const double ratio = root > 0.0 ? d / root : 1.0;
    PolaritonBasis b;
    b.C_plus = std::sqrt(0.5 * (1.0 + ratio));
    b.C_minus = std::sqrt(0.5 * (1.0 - ratio));
    b.E_plus = s.mean_frequency() + 0.5 * root;
    b.E_minus = s.mean_frequency() - 0.5 * root;
    return b;
}

struct Liouvillian::Cache {
    std::once_flag once;
    Eigendecomposition eig;
};

Liouvillian::Liouvillian(const SuperOperator& matrix, Frame frame)
    : matrix_(matrix), frame_(frame), cache_(std::make_shared<Cache>())
{
    if (!matrix_.allFinite()) throw NumericalError("Liouvillian has non-finite entries");
}

const Eigendecomposition& Liouvillian::eig() const
{
    std::call_once(cache_->once, [this] {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(Eigen::MatrixXcd(matrix_), true);
        if (solver.info() != Eigen::Success) throw NumericalError("Liouvillian eigensolver failed");
        Eigendecomposition e;
        e.values = solver.eigenvalues();
        e.right = solver.eigenvectors();
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(e.right);
        e.left = lu.inverse();
        const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(e.right);
        const auto& sv = svd.singularValues();
        e.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                              : std::numeric_limits<double>::infinity();
        cache_->eig = std::move(e);
    });
    return cache_->eig;
}

SuperOperator Liouvillian::propagator(double t) const
{
    const SuperOperator scaled = matrix_ * t;
    return scaled.exp();
}

VecState Liouvillian::integrated_action(const VecState& x, double t) const
{
    constexpr int n = kDim * kDim;
    Eigen::Matrix<cdouble, n + 1, n + 1> aug = Eigen::Matrix<cdouble, n + 1, n + 1>::Zero();
    aug.topLeftCorner<n, n>() = matrix_ * t;
    aug.topRightCorner<n, 1>() = x * t;
    const Eigen::Matrix<cdouble, n + 1, n + 1> e = aug.exp();
    return e.topRightCorner<n, 1>();
}

double Liouvillian::trace_residual() const
{
    const VecState id = vec(Operator::Identity());
    return (id.transpose() * matrix_).norm();
}

StabilityReport Liouvillian::stability(double tolerance) const
{
    StabilityReport report;
    const auto& values = eig().values;
    report.max_real = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < values.size(); ++k) {
        report.max_real = std::max(report.max_real, values(k).real());
        if (values(k).real() > tolerance) report.positive.push_back(values(k));
    }
    return report;
}

Liouvillian assemble_liouvillian(const Operator& H, const std::vector<RateOperator>& dissipators,
                                 const SuperOperator& phonon_kernel, Frame frame)
{
    SuperOperator L = commutator_generator(H) + phonon_kernel;
    for (const auto& d : dissipators) {
        if (d.rate != 0.0) L += d.rate * lindblad_dissipator(d.A);
    }
    return Liouvillian(L, frame);
}

} // namespace pcqed
