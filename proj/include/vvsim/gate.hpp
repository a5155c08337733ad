#pragma once

// Post-selected two-photon entangling gate on the hybrid qubits, CHSH
// evaluation/optimization (Horodecki criterion) and the Werner noise channel.
//
// Logical 2-qubit indexing is qubit_c (x) qubit_d, index = 2*i_c + i_d.
// The port-d photon picks up one further reflection before detection; its
// phase convention is fixed so that the canonical preparation yields exactly
// the triplet (|01> + |10>)/sqrt(2):
//     |L,m> -> |R,-m>,   |R,m> -> -|L,-m>.

#include <cstdint>

#include <Eigen/Dense>

#include "vvsim/fock2.hpp"
#include "vvsim/modes.hpp"

namespace vvsim {

// Hermitian, positive semidefinite, unit-trace operator. Construction checks
// the invariants (hermiticity/trace to 1e-10, eigenvalues >= -1e-10).
class DensityMatrix {
  public:
    explicit DensityMatrix(Eigen::MatrixXcd matrix);
    static DensityMatrix pure(const Eigen::VectorXcd& psi);
    static DensityMatrix maximally_mixed(int dim);

    const Eigen::MatrixXcd& matrix() const { return matrix_; }
    int dim() const { return static_cast<int>(matrix_.rows()); }

    double purity() const;
    double min_eigenvalue() const;

  private:
    Eigen::MatrixXcd matrix_;
};

// (|01> + |10>)/sqrt(2)
Eigen::Vector4cd triplet_ket();

struct GateResult {
    DensityMatrix rho;   // logical two-qubit state, pure
    double success_prob; // coincidence probability p_cd
    double leakage;      // coincidence weight outside the logical span
};

// Beam-splitter interference + coincidence post-selection + logical mapping.
// relabel_d applies the port-d reflection above before the logical relabeling.
GateResult entangling_gate(const SingleKet& input_a, const SingleKet& input_b,
                           const LogicalQubitMap& map = LogicalQubitMap::hybrid(),
                           bool relabel_d = true);

// v rho + (1-v) I/dim
DensityMatrix werner(const DensityMatrix& rho, double v);

// Four analyzer Bloch directions; constructor normalizes.
struct ChshSetting {
    Eigen::Vector3d a;
    Eigen::Vector3d a_prime;
    Eigen::Vector3d b;
    Eigen::Vector3d b_prime;

    ChshSetting(Eigen::Vector3d a_, Eigen::Vector3d ap_, Eigen::Vector3d b_, Eigen::Vector3d bp_);
};

// E(x, y) = Tr[rho (x.sigma) (x) (y.sigma)]
double correlation(const DensityMatrix& rho, const Eigen::Vector3d& x, const Eigen::Vector3d& y);

// S = E(a,b) - E(a,b') + E(a',b) + E(a',b')
double chsh_value(const DensityMatrix& rho, const ChshSetting& setting);

struct ChshOptimum {
    double s_max;
    ChshSetting setting;
};

// Closed-form optimum from the two largest singular values of the correlation
// matrix T_ij = Tr[rho sigma_i (x) sigma_j]; the returned setting reaches
// s_max when fed back through chsh_value.
ChshOptimum chsh_optimal(const DensityMatrix& rho);

// Wootters concurrence of a two-qubit state.
double concurrence(const DensityMatrix& rho);

// <psi| rho |psi> for a pure reference ket.
double fidelity_to_pure(const DensityMatrix& rho, const Eigen::VectorXcd& psi);

}  // namespace vvsim
