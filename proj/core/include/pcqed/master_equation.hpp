// master_equation.hpp — Weak, polaron, variational and polariton-polaron second-order master equations

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pcqed/bath.hpp"
#include "pcqed/system.hpp"

namespace pcqed {

enum class Method { weak, polaron, variational, polariton_polaron };
std::string to_string(Method m);
Method method_from_string(const std::string& name);

struct PhononChannel {
    std::string label;   // X, Y, Z or PM
    Operator A;
    Kernel kernel;       // which bath correlation family A couples to
};

// Factor multiplying the frame correlator during back-transformation:
// scale * exp(phi_weight * phi_F(tau)); trivial when phi_weight == 0 and scale == 1.
struct SidebandFactor {
    double scale{1.0};
    double phi_weight{0.0};
    std::shared_ptr<const VariationalProfile> profile;
    BathParams bath;

    bool trivial() const { return phi_weight == 0.0 && scale == 1.0; }
    std::vector<cdouble> evaluate(const TauGrid& tau) const;
};

struct BuildOptions {
    std::size_t quadrature_nodes{400};
    double nu_max_factor{8.0};
    TauGridOptions tau;
    VariationalOptions variational;
    DephasingConvention dephasing{DephasingConvention::as_printed};
    bool include_dephasing{true};
};

struct MasterEquationSpec {
    Method method{Method::weak};
    Frame frame{Frame::lab};
    SystemParams system;
    BathParams bath;
    Operator frame_hamiltonian{Operator::Zero()};
    std::vector<PhononChannel> channels;
    std::shared_ptr<const CorrelationTable> table;
    std::shared_ptr<const VariationalProfile> profile;   // F behind the frame (0 for weak)
    SidebandFactor cavity_sideband;
    SidebandFactor dipole_sideband;
    double dephasing{0.0};          // gamma(T), enters as 2 gamma D[sigma^dag sigma]
    double polaron_shift{0.0};      // Delta_p of the bath
    double decay_tol{1e-4};
};

// Channel operators in the {|g,0>, |X,0>, |g,1>} basis (bare g).
Operator channel_x(double g);
Operator channel_y(double g);
Operator channel_z();
Operator channel_pm();   // sigma^dag sigma - P1/2 = (p^dag m + m^dag p)/2 at resonance

// K[rho] built from the frame eigenbasis, no secular approximation.
SuperOperator phonon_dissipator(const Operator& H_frame, const std::vector<PhononChannel>& channels,
                                const CorrelationTable& table, double decay_tol = 1e-3);

MasterEquationSpec build_weak(const SystemParams& s, const BathParams& p, const BuildOptions& opts = {});
MasterEquationSpec build_polaron(const SystemParams& s, const BathParams& p, const BuildOptions& opts = {});
MasterEquationSpec build_variational(const SystemParams& s, const BathParams& p, const BuildOptions& opts = {});
// Variational structure with a forced profile (limit checks): F == 0 or F == 1 or any solved F.
MasterEquationSpec build_variational_with(const SystemParams& s, const BathParams& p,
                                          const VariationalProfile& F, const BuildOptions& opts = {});
MasterEquationSpec build_polariton_polaron(const SystemParams& s, const BathParams& p, const BuildOptions& opts = {});
MasterEquationSpec build(Method m, const SystemParams& s, const BathParams& p, const BuildOptions& opts = {});

// Largest |epsilon_m - epsilon_n| of the frame Hamiltonian.
double max_bohr_frequency(const Operator& H);

Liouvillian assemble(const MasterEquationSpec& spec);

} // namespace pcqed
