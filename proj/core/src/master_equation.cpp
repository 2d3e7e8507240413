// master_equation.cpp — Frame Hamiltonians, phonon channels and dissipators of the four methods

#include "pcqed/master_equation.hpp"

#include <cmath>

#include "pcqed/errors.hpp"

namespace pcqed {

std::string to_string(Method m)
{
    switch (m) {
    case Method::weak: return "weak";
    case Method::polaron: return "polaron";
    case Method::variational: return "variational";
    case Method::polariton_polaron: return "polariton-polaron";
    }
    return "unknown";
}

Method method_from_string(const std::string& name)
{
    if (name == "weak") return Method::weak;
    if (name == "polaron") return Method::polaron;
    if (name == "variational") return Method::variational;
    if (name == "polariton-polaron") return Method::polariton_polaron;
    throw ConfigError("unknown method '" + name + "'");
}

std::vector<cdouble> SidebandFactor::evaluate(const TauGrid& tau) const
{
    std::vector<cdouble> out(tau.count, scale);
    if (phi_weight == 0.0 || !profile) return out;
    const std::vector<cdouble> ph = phi_series(*profile, bath, profile->grid(), tau);
    for (std::size_t j = 0; j < tau.count; ++j) out[j] = scale * std::exp(phi_weight * ph[j]);
    return out;
}

Operator channel_x(double g)
{
    return g * (ops::ket_bra(kX0, kG1) + ops::ket_bra(kG1, kX0));
}

Operator channel_y(double g)
{
    const cdouble i(0.0, 1.0);
    return i * g * (ops::ket_bra(kG1, kX0) - ops::ket_bra(kX0, kG1));
}

Operator channel_z() { return ops::projector(kX0); }

Operator channel_pm() { return ops::projector(kX0) - 0.5 * ops::excited_manifold(); }

double max_bohr_frequency(const Operator& H)
{
    const Eigen::SelfAdjointEigenSolver<Operator> es(H);
    const auto& e = es.eigenvalues();
    return e.maxCoeff() - e.minCoeff();
}

SuperOperator phonon_dissipator(const Operator& H_frame, const std::vector<PhononChannel>& channels,
                                const CorrelationTable& table, double decay_tol)
{
    SuperOperator K = SuperOperator::Zero();
    if (channels.empty()) return K;
    for (const auto& c : channels) {
        if (!table.declares(c.kernel)) {
            throw SpecError("phonon channel " + c.label + " has no correlation family in the table");
        }
    }
    const Eigen::SelfAdjointEigenSolver<Operator> es(H_frame);
    if (es.info() != Eigen::Success) throw NumericalError("phonon_dissipator: frame eigensolver failed");
    const Operator U = es.eigenvectors();
    const auto& eps = es.eigenvalues();

    std::vector<Operator> rotated;
    rotated.reserve(channels.size());
    for (const auto& c : channels) rotated.push_back(U.adjoint() * c.A * U);

    // (Lambda_i)_mn = sum_j (A_j)_mn Gamma_ij(eps_m - eps_n) in the frame eigenbasis.
    for (std::size_t i = 0; i < channels.size(); ++i) {
        Operator lambda_eig = Operator::Zero();
        for (std::size_t j = 0; j < channels.size(); ++j) {
            const Kernel ki = channels[i].kernel;
            const Kernel kj = channels[j].kernel;
            if (!table.has(ki, kj)) continue;
            for (int m = 0; m < kDim; ++m) {
                for (int n = 0; n < kDim; ++n) {
                    const cdouble a = rotated[j](m, n);
                    if (a == 0.0) continue;
                    lambda_eig(m, n) += a * half_fourier(table, ki, kj, eps(m) - eps(n), decay_tol);
                }
            }
        }
        const Operator lambda = U * lambda_eig * U.adjoint();
        const Operator& A = channels[i].A;
        const Operator lambda_dag = lambda.adjoint();
        K -= left_multiply(A * lambda) - left_multiply(lambda) * right_multiply(A) + right_multiply(lambda_dag * A) -
             left_multiply(A) * right_multiply(lambda_dag);
    }
    return K;
}

namespace {

MasterEquationSpec base_spec(Method m, Frame f, const SystemParams& s, const BathParams& p, const BuildOptions& opts,
                             const QuadratureGrid& grid)
{
    s.validate();
    p.validate();
    MasterEquationSpec spec;
    spec.method = m;
    spec.frame = f;
    spec.system = s;
    spec.bath = p;
    spec.polaron_shift = polaron_shift(p, grid);
    spec.dephasing = opts.include_dephasing ? dephasing_rate(p, grid, opts.dephasing) : 0.0;
    spec.decay_tol = opts.tau.decay_tol;
    spec.cavity_sideband.bath = p;
    spec.dipole_sideband.bath = p;
    return spec;
}

std::shared_ptr<const CorrelationTable> make_table(const VariationalProfile& F, const BathParams& p,
                                                   const Operator& H, const BuildOptions& opts)
{
    if (p.alpha == 0.0) {
        auto empty = std::make_shared<CorrelationTable>(TauGrid{0.01, 3});
        for (Kernel k : {Kernel::X, Kernel::Y, Kernel::Z}) empty->declare(k);
        return empty;
    }
    const TauGrid tau = choose_tau_grid(F, p, max_bohr_frequency(H), opts.tau);
    return std::make_shared<CorrelationTable>(correlation_table(F, p, tau));
}

} // namespace

MasterEquationSpec build_weak(const SystemParams& s, const BathParams& p, const BuildOptions& opts)
{
    const QuadratureGrid grid = QuadratureGrid::standard(p, opts.quadrature_nodes, opts.nu_max_factor);
    MasterEquationSpec spec = base_spec(Method::weak, Frame::lab, s, p, opts, grid);
    spec.frame_hamiltonian = hamiltonian_rotating(s);
    spec.channels = {{"Z", channel_z(), Kernel::Z}};
    auto F = std::make_shared<VariationalProfile>(VariationalProfile::constant(0.0, p, grid));
    F->gV = s.g;
    spec.profile = F;
    spec.table = make_table(*F, p, spec.frame_hamiltonian, opts);
    return spec;
}

MasterEquationSpec build_variational_with(const SystemParams& s, const BathParams& p, const VariationalProfile& F,
                                          const BuildOptions& opts)
{
    const bool polaron = F.is_constant() && F.constant_value() == 1.0;
    MasterEquationSpec spec = base_spec(polaron ? Method::polaron : Method::variational,
                                        polaron ? Frame::polaron : Frame::variational, s, p, opts, F.grid());
    auto profile = std::make_shared<VariationalProfile>(F);
    profile->gV = F.B * s.g;
    spec.profile = profile;
    spec.frame_hamiltonian = jc_hamiltonian(s.delta(), profile->gV, profile->R);
    spec.channels = {{"X", channel_x(s.g), Kernel::X}, {"Y", channel_y(s.g), Kernel::Y}, {"Z", channel_z(), Kernel::Z}};
    spec.table = make_table(*profile, p, spec.frame_hamiltonian, opts);
    spec.dipole_sideband.scale = profile->B * profile->B;
    spec.dipole_sideband.phi_weight = 1.0;
    spec.dipole_sideband.profile = profile;
    return spec;
}

MasterEquationSpec build_variational(const SystemParams& s, const BathParams& p, const BuildOptions& opts)
{
    const QuadratureGrid grid = QuadratureGrid::standard(p, opts.quadrature_nodes, opts.nu_max_factor);
    const VariationalProfile F = solve_variational(s.delta(), s.g, p, grid, opts.variational);
    MasterEquationSpec spec = build_variational_with(s, p, F, opts);
    spec.method = Method::variational;
    spec.frame = Frame::variational;
    return spec;
}

MasterEquationSpec build_polaron(const SystemParams& s, const BathParams& p, const BuildOptions& opts)
{
    const QuadratureGrid grid = QuadratureGrid::standard(p, opts.quadrature_nodes, opts.nu_max_factor);
    MasterEquationSpec spec = build_variational_with(s, p, VariationalProfile::constant(1.0, p, grid), opts);
    // With F == 1 the Z family vanishes identically; only X and Y remain.
    spec.channels.pop_back();
    return spec;
}

MasterEquationSpec build_polariton_polaron(const SystemParams& s, const BathParams& p, const BuildOptions& opts)
{
    if (s.delta() != 0.0) {
        throw UnsupportedConfiguration("polariton-polaron method is only defined at zero detuning");
    }
    const QuadratureGrid grid = QuadratureGrid::standard(p, opts.quadrature_nodes, opts.nu_max_factor);
    MasterEquationSpec spec = base_spec(Method::polariton_polaron, Frame::polariton_polaron, s, p, opts, grid);
    const double dp = spec.polaron_shift;
    // H_JC with the exciton shifted by Delta_p, minus the Delta_p/4 dressing of both polaritons.
    spec.frame_hamiltonian = jc_hamiltonian(0.0, s.g, dp) - 0.25 * dp * ops::excited_manifold();
    spec.channels = {{"PM", channel_pm(), Kernel::Z}};
    auto weak = std::make_shared<VariationalProfile>(VariationalProfile::constant(0.0, p, grid));
    weak->gV = s.g;
    spec.profile = weak;
    spec.table = make_table(*weak, p, spec.frame_hamiltonian, opts);

    auto full = std::make_shared<VariationalProfile>(VariationalProfile::constant(1.0, p, grid));
    for (SidebandFactor* f : {&spec.cavity_sideband, &spec.dipole_sideband}) {
        f->scale = std::sqrt(full->B);
        f->phi_weight = 0.25;
        f->profile = full;
    }
    return spec;
}

MasterEquationSpec build(Method m, const SystemParams& s, const BathParams& p, const BuildOptions& opts)
{
    switch (m) {
    case Method::weak: return build_weak(s, p, opts);
    case Method::polaron: return build_polaron(s, p, opts);
    case Method::variational: return build_variational(s, p, opts);
    case Method::polariton_polaron: return build_polariton_polaron(s, p, opts);
    }
    throw ConfigError("unknown method");
}

Liouvillian assemble(const MasterEquationSpec& spec)
{
    if (!spec.table && !spec.channels.empty()) throw SpecError("master equation has channels but no correlation table");
    const SuperOperator K = spec.channels.empty() || spec.bath.alpha == 0.0
                                ? SuperOperator::Zero()
                                : phonon_dissipator(spec.frame_hamiltonian, spec.channels, *spec.table,
                                                    10.0 * spec.decay_tol);
    std::vector<RateOperator> rates = {{spec.system.kappa, ops::cavity()},
                                       {2.0 * spec.dephasing, ops::projector(kX0)}};
    return assemble_liouvillian(spec.frame_hamiltonian, rates, K, spec.frame);
}

} // namespace pcqed
