// test_master_equation.cpp — Phonon dissipator, the four frame builders and their limit web

#include <doctest.h>

#include <cmath>
#include <random>

#include "pcqed/errors.hpp"
#include "pcqed/master_equation.hpp"

using namespace pcqed;

namespace {

SystemParams resonant(double g, double kappa = 0.5)
{
    SystemParams s;
    s.g = g;
    s.kappa = kappa;
    return s;
}

BathParams bath_at(double T, double alpha = 0.0251)
{
    BathParams p;
    p.temperature = T;
    p.alpha = alpha;
    return p;
}

double distance(const Liouvillian& a, const Liouvillian& b) { return (a.matrix() - b.matrix()).norm(); }

Operator random_hermitian(std::mt19937& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    Operator A;
    for (int i = 0; i < kDim; ++i) {
        for (int j = 0; j < kDim; ++j) A(i, j) = cdouble(n(rng), n(rng));
    }
    Operator rho = A * A.adjoint();
    return rho / rho.trace();
}

Eigen::Vector2d excited_levels(const Operator& H)
{
    const Eigen::Matrix2cd block = H.bottomRightCorner<2, 2>();
    return Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd>(block).eigenvalues();
}

} // namespace

TEST_CASE("phonon dissipator structure")
{
    SUBCASE("vanishing kernels give a zero superoperator")
    {
        CorrelationTable empty(TauGrid{0.01, 101});
        empty.declare(Kernel::Z);
        const SuperOperator K = phonon_dissipator(jc_hamiltonian(0.0, 1.0), {{"Z", channel_z(), Kernel::Z}}, empty);
        CHECK(K.norm() == 0.0);
    }
    SUBCASE("undeclared kernel family is a spec error")
    {
        CorrelationTable table(TauGrid{0.01, 101});
        table.declare(Kernel::X);
        CHECK_THROWS_AS(phonon_dissipator(jc_hamiltonian(0.0, 1.0), {{"Z", channel_z(), Kernel::Z}}, table), SpecError);
    }
    SUBCASE("commuting Z channel with constant real kernel is pure dephasing")
    {
        const TauGrid tau{0.01, 201};
        CorrelationTable table(tau);
        table.declare(Kernel::Z);
        const double c = 0.3;
        table.set(Kernel::Z, Kernel::Z, std::vector<cdouble>(tau.count, c));
        // Degenerate frame: every Bohr frequency is zero, Gamma = c tau_max.
        const SuperOperator K =
            phonon_dissipator(Operator::Zero(), {{"Z", channel_z(), Kernel::Z}}, table, 10.0);
        const double rate = c * tau.tau_max();
        Operator rho = Operator::Zero();
        rho(kX0, kG0) = 1.0;
        rho(kG0, kX0) = 1.0;
        rho(kX0, kX0) = 0.5;
        rho(kG0, kG0) = 0.5;
        const Operator d = unvec(K * vec(rho));
        CHECK(std::abs(d(kX0, kG0) + rate) < 1e-12);
        CHECK(std::abs(d(kG0, kX0) + rate) < 1e-12);
        CHECK(std::abs(d(kX0, kX0)) < 1e-12);
        CHECK(std::abs(d(kG0, kG0)) < 1e-12);
    }
    SUBCASE("dissipators of every method annihilate the trace")
    {
        std::mt19937 rng(17);
        for (Method m : {Method::weak, Method::polaron, Method::variational, Method::polariton_polaron}) {
            const MasterEquationSpec spec = build(m, resonant(2.23), bath_at(50.0));
            const SuperOperator K = phonon_dissipator(spec.frame_hamiltonian, spec.channels, *spec.table);
            const VecState id = vec(Operator::Identity());
            CHECK((id.transpose() * K).norm() < 1e-10);
            for (int k = 0; k < 5; ++k) {
                const Operator out = unvec(K * vec(random_hermitian(rng)));
                CHECK(std::abs(out.trace()) < 1e-12);
                CHECK((out - out.adjoint()).norm() < 1e-12);
            }
        }
    }
}

TEST_CASE("weak-coupling builder")
{
    const MasterEquationSpec spec = build_weak(resonant(2.23), bath_at(4.0));
    REQUIRE(spec.channels.size() == 1);
    CHECK(spec.channels.front().label == "Z");
    CHECK(spec.frame == Frame::lab);
    CHECK(spec.cavity_sideband.trivial());
    CHECK(spec.dipole_sideband.trivial());
    CHECK((spec.frame_hamiltonian - hamiltonian_rotating(resonant(2.23))).norm() == 0.0);

    const BathParams free = bath_at(4.0, 0.0);
    const Liouvillian L = assemble(build_weak(resonant(2.23), free));
    const Liouvillian bare = assemble_liouvillian(hamiltonian_rotating(resonant(2.23)), {{0.5, ops::cavity()}},
                                                  SuperOperator::Zero(), Frame::lab);
    CHECK(distance(L, bare) < 1e-14);
}

TEST_CASE("variational limit web")
{
    for (double T : {4.0, 50.0}) {
        const BathParams p = bath_at(T);
        const QuadratureGrid q = QuadratureGrid::standard(p);
        for (double g : {0.57, 2.23, 7.91}) {
            const SystemParams s = resonant(g);
            const Liouvillian weak = assemble(build_weak(s, p));
            const Liouvillian var0 = assemble(build_variational_with(s, p, VariationalProfile::constant(0.0, p, q)));
            CHECK(distance(weak, var0) < 1e-10);
            const Liouvillian polaron = assemble(build_polaron(s, p));
            const Liouvillian var1 = assemble(build_variational_with(s, p, VariationalProfile::constant(1.0, p, q)));
            CHECK(distance(polaron, var1) < 1e-10);
        }
    }
}

TEST_CASE("polaron and variational builders")
{
    const BathParams p = bath_at(4.0);
    SUBCASE("polaron keeps only the X and Y families")
    {
        const MasterEquationSpec spec = build_polaron(resonant(2.23), p);
        REQUIRE(spec.channels.size() == 2);
        CHECK(spec.channels[0].label == "X");
        CHECK(spec.channels[1].label == "Y");
        CHECK(!spec.table->has(Kernel::Z, Kernel::Z));
        CHECK(!spec.table->has(Kernel::Y, Kernel::Z));
        CHECK(spec.method == Method::polaron);
        CHECK(!spec.dipole_sideband.trivial());
        CHECK(spec.cavity_sideband.trivial());
    }
    SUBCASE("g = 0 variational equals polaron")
    {
        const SystemParams s = resonant(0.0);
        const Liouvillian var = assemble(build_variational(s, p));
        const Liouvillian pol = assemble(build_polaron(s, p));
        CHECK(distance(var, pol) < 1e-10);
    }
    SUBCASE("frame splitting at resonance")
    {
        for (double g : {0.57, 2.23}) {
            const MasterEquationSpec spec = build_variational(resonant(g), p);
            const double gv = spec.profile->gV;
            const double R = spec.profile->R;
            const Eigen::Vector2d e = excited_levels(spec.frame_hamiltonian);
            CHECK(e(1) - e(0) == doctest::Approx(std::sqrt(4.0 * gv * gv + R * R)).scale(0.0).epsilon(1e-12));
            CHECK(gv == doctest::Approx(spec.profile->B * g).scale(0.0).epsilon(1e-14));
            // Channels carry the bare coupling.
            CHECK((spec.channels[0].A - channel_x(g)).norm() == 0.0);
        }
    }
    SUBCASE("channel operators are Hermitian")
    {
        for (const Operator& A : {channel_x(1.3), channel_y(1.3), channel_z(), channel_pm()}) {
            CHECK((A - A.adjoint()).norm() == 0.0);
        }
    }
}

TEST_CASE("polariton-polaron builder")
{
    const BathParams p = bath_at(4.0);
    SUBCASE("detuning is unsupported")
    {
        SystemParams s = resonant(2.23);
        s.omega_eg = 0.1;
        CHECK_THROWS_AS(build_polariton_polaron(s, p), UnsupportedConfiguration);
    }
    SUBCASE("alpha = 0 reduces to the bare polaritons")
    {
        const MasterEquationSpec spec = build_polariton_polaron(resonant(2.23), bath_at(4.0, 0.0));
        const Eigen::Vector2d e = excited_levels(spec.frame_hamiltonian);
        CHECK(e(0) == doctest::Approx(-2.23).scale(0.0).epsilon(1e-14));
        CHECK(e(1) == doctest::Approx(2.23).scale(0.0).epsilon(1e-14));
        CHECK(spec.cavity_sideband.trivial() == false);
        CHECK(assemble(spec).matrix().norm() > 0.0);
        const Liouvillian bare = assemble_liouvillian(hamiltonian_rotating(resonant(2.23)), {{0.5, ops::cavity()}},
                                                      SuperOperator::Zero(), Frame::lab);
        CHECK(distance(assemble(spec), bare) < 1e-12);
    }
    SUBCASE("frame Hamiltonian against direct 2x2 diagonalization in the polariton basis")
    {
        const double g = 2.23;
        const MasterEquationSpec spec = build_polariton_polaron(resonant(g), p);
        const double dp = spec.polaron_shift;
        CHECK(dp / 4.0 == doctest::Approx(-0.1233 / 4.0).scale(0.0).epsilon(1e-3));
        // Polariton block {E_+ + dp/4, E_- + dp/4} with -dp/2 coupling, E_+- = +-g.
        Eigen::Matrix2d block;
        block << g + dp / 4.0, -dp / 2.0, -dp / 2.0, -g + dp / 4.0;
        const Eigen::Vector2d ref = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(block).eigenvalues();
        const Eigen::Vector2d e = excited_levels(spec.frame_hamiltonian);
        CHECK(e(0) == doctest::Approx(ref(0)).scale(0.0).epsilon(1e-13));
        CHECK(e(1) == doctest::Approx(ref(1)).scale(0.0).epsilon(1e-13));
        CHECK(ref(1) == doctest::Approx(dp / 4.0 + std::sqrt(g * g + dp * dp / 4.0)).scale(0.0).epsilon(1e-13));
        REQUIRE(spec.channels.size() == 1);
        CHECK(spec.channels.front().kernel == Kernel::Z);
    }
    SUBCASE("PM dissipator is covariant under the polariton exchange")
    {
        const MasterEquationSpec spec = build_polariton_polaron(resonant(2.23), p);
        const PolaritonBasis b = polariton_basis(resonant(2.23));
        // U swaps |+> and |->, keeps |g,0>.
        Eigen::Vector3cd g0 = Eigen::Vector3cd::Zero();
        g0(kG0) = 1.0;
        const Operator U = g0 * g0.adjoint() + b.ket_plus() * b.ket_minus().adjoint() +
                           b.ket_minus() * b.ket_plus().adjoint();
        const Operator A = spec.channels.front().A;
        CHECK((U * A * U.adjoint() - A).norm() < 1e-14);
        const Operator H_swapped = U * spec.frame_hamiltonian * U.adjoint();
        const SuperOperator K = phonon_dissipator(spec.frame_hamiltonian, spec.channels, *spec.table);
        const SuperOperator K_swapped = phonon_dissipator(H_swapped, spec.channels, *spec.table);
        const SuperOperator W = left_multiply(U) * right_multiply(U.adjoint());
        CHECK((K_swapped - W * K * W.adjoint()).norm() < 1e-10 * K.norm());
    }
}

TEST_CASE("all four methods coincide without phonons")
{
    const BathParams free = bath_at(50.0, 0.0);
    for (double g : {0.57, 2.23, 7.91}) {
        const Liouvillian ref = assemble(build_weak(resonant(g), free));
        for (Method m : {Method::polaron, Method::variational, Method::polariton_polaron}) {
            CHECK(distance(assemble(build(m, resonant(g), free)), ref) < 1e-10);
        }
    }
}

TEST_CASE("method names round-trip")
{
    for (Method m : {Method::weak, Method::polaron, Method::variational, Method::polariton_polaron}) {
        CHECK(method_from_string(to_string(m)) == m);
    }
    CHECK_THROWS_AS(method_from_string("redfield"), ConfigError);
}
