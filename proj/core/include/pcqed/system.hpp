// system.hpp — Single-excitation emitter-cavity space, Hamiltonians, dissipators, Liouvillian

#pragma once

#include <complex>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace pcqed {

// Basis order {|g,0>, |X,0>, |g,1>}.
inline constexpr int kDim = 3;
inline constexpr int kG0 = 0;
inline constexpr int kX0 = 1;
inline constexpr int kG1 = 2;

using cdouble = std::complex<double>;
using Operator = Eigen::Matrix<std::complex<double>, kDim, kDim>;
using SuperOperator = Eigen::Matrix<std::complex<double>, kDim * kDim, kDim * kDim>;
using VecState = Eigen::Matrix<std::complex<double>, kDim * kDim, 1>;

struct SystemParams {
    double omega_eg{0.0};   // rad/ps
    double omega_c{0.0};    // rad/ps
    double g{2.23};         // rad/ps
    double kappa{0.5};      // rad/ps

    double delta() const { return omega_eg - omega_c; }
    double mean_frequency() const { return 0.5 * (omega_eg + omega_c); }
    void validate() const;
};

enum class Frame { lab, polaron, variational, polariton_polaron };
std::string to_string(Frame f);

namespace ops {
Operator identity();
Operator sigma();          // |g,0><X,0|
Operator cavity();         // a = |g,0><g,1|
Operator projector(int i);
Operator excited_manifold();   // |X,0><X,0| + |g,1><g,1|
Operator ket_bra(int i, int j);
} // namespace ops

// Column stacking: vec(A X B) = (B^T kron A) vec(X).
VecState vec(const Operator& rho);
Operator unvec(const VecState& v);
SuperOperator left_multiply(const Operator& A);
SuperOperator right_multiply(const Operator& B);
SuperOperator commutator_generator(const Operator& H);   // rho -> -i[H, rho]
SuperOperator lindblad_dissipator(const Operator& A);    // 1/2 (2 A rho A^dag - rho A^dag A - A^dag A rho)

// Rotating frame at the mean frequency: diag(0, delta/2, -delta/2) plus coupling g.
Operator jc_hamiltonian(double delta, double g, double shift = 0.0);
// Lab-frame H_S with absolute frequencies.
Operator hamiltonian_lab(const SystemParams& s);
// Rotating-frame H_S at omega_bar.
Operator hamiltonian_rotating(const SystemParams& s);

struct PolaritonBasis {
    double C_plus{0.0};
    double C_minus{0.0};
    double E_plus{0.0};
    double E_minus{0.0};
    // |+> = C_+ |X,0> + C_- |g,1>,  |-> = C_- |X,0> - C_+ |g,1>
    Eigen::Vector3cd ket_plus() const;
    Eigen::Vector3cd ket_minus() const;
    Operator p() const;   // |g,0><+|
    Operator m() const;   // |g,0><-|
};
PolaritonBasis polariton_basis(const SystemParams& s);

struct Eigendecomposition {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd right;       // columns: right eigenvectors
    Eigen::MatrixXcd left;        // rows: left eigenvectors, left * right = 1
    double condition{0.0};        // cond(right)
};

struct StabilityReport {
    double max_real{0.0};
    std::vector<std::complex<double>> positive;   // eigenvalues with Re > tolerance
    bool stable() const { return positive.empty(); }
};

class Liouvillian {
public:
    Liouvillian() : Liouvillian(SuperOperator::Zero(), Frame::lab) {}
    Liouvillian(const SuperOperator& matrix, Frame frame);

    const SuperOperator& matrix() const { return matrix_; }
    Frame frame() const { return frame_; }

    // Lazily computed, cached, thread-safe.
    const Eigendecomposition& eig() const;
    SuperOperator propagator(double t) const;
    // int_0^t e^{L s} x ds, exact through the augmented exponential.
    VecState integrated_action(const VecState& x, double t) const;
    VecState apply(const VecState& x) const { return matrix_ * x; }
    Operator apply(const Operator& rho) const { return unvec(matrix_ * vec(rho)); }

    double trace_residual() const;
    StabilityReport stability(double tolerance = 1e-8) const;

private:
    struct Cache;
    SuperOperator matrix_;
    Frame frame_;
    std::shared_ptr<Cache> cache_;
};

struct RateOperator {
    double rate{0.0};
    Operator A;
};

// -i[H, .] + sum rate D_A + kernel.
Liouvillian assemble_liouvillian(const Operator& H, const std::vector<RateOperator>& dissipators,
                                 const SuperOperator& phonon_kernel, Frame frame);

} // namespace pcqed
