#ifndef RBMTOMO_HAMILTONIAN_HPP
#define RBMTOMO_HAMILTONIAN_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "rbmtomo/common.hpp"
#include "rbmtomo/state.hpp"

namespace rbmtomo {

/// Rydberg-chain Hamiltonian
///   H = -delta sum_i n_i - (omega/2) sum_i sx_i
///       + sum_{i<j, |i-j|<=cutoff} v_nn / |i-j|^6 n_i n_j
/// Couplings are stored in the same frequency unit as the inputs (MHz);
/// time evolution multiplies by the angular factor 2*pi, see lindblad.hpp.
struct HamiltonianParams {
    int n_sites = 0;
    double v_nn = 0.0;  // MHz, nearest-neighbor interaction
    double omega = 0.0; // MHz, Rabi frequency
    double delta = 0.0; // MHz, detuning
    int interaction_cutoff = -1; // max |i-j| with nonzero coupling; -1 means N-1

    int cutoff() const { return interaction_cutoff < 0 ? n_sites - 1 : interaction_cutoff; }
    void validate() const;
};

/// Memory budget for materializing dense operators; beyond it the matrix-free
/// paths must be used.
constexpr std::size_t kDefaultMatrixBudgetBytes = std::size_t{2} << 30;

/// Diagonal of H in the occupation basis (interaction + detuning terms).
Eigen::VectorXd hamiltonian_diagonal(const HamiltonianParams& p);

/// Dense 2^N x 2^N real symmetric matrix. Throws ResourceError when the
/// matrix would not fit the budget or N exceeds 16.
Eigen::MatrixXd build_hamiltonian(const HamiltonianParams& p,
                                  std::size_t budget_bytes = kDefaultMatrixBudgetBytes);

/// y = H x without materializing H; valid for any N the vectors fit.
void apply_hamiltonian(const HamiltonianParams& p, const Eigen::VectorXd& diag,
                       const Eigen::VectorXd& x, Eigen::VectorXd& y);

struct GroundStateResult {
    QuantumState state;
    double energy = 0.0;
    double gap = 0.0;        // E1 - E0 estimate
    bool degenerate = false; // gap below the degeneracy threshold
};

constexpr double kDegeneracyGap = 1e-9;

/// Lowest eigenpair of a real symmetric matrix, with the global sign fixed so
/// the largest-magnitude amplitude is positive. Degenerate ground spaces are
/// flagged and resolved by the lexicographically smallest dominant
/// configuration.
GroundStateResult ground_state(const Eigen::MatrixXd& H);

/// Ground state straight from parameters. Uses the dense solver while the
/// matrix fits `dense_dim_limit`, a matrix-free Lanczos iteration above it
/// (needed from N ~ 13 where the dense matrix stops fitting memory).
GroundStateResult ground_state(const HamiltonianParams& p, Eigen::Index dense_dim_limit = 4096);

/// The three-configuration superposition approximating the ordered N=8 state:
/// amplitudes 1/sqrt(2), 1/2, 1/2 on 10100101, 10010101, 10101001.
QuantumState approx_z2_state();

/// Second-order effective Hamiltonian on the blockaded three-state manifold;
/// off-diagonal elements -omega^2/(4 delta) between the first state and the
/// other two. Throws NumericError when delta == 0.
Eigen::Matrix3d effective_blockade_hamiltonian(double omega, double delta);

} // namespace rbmtomo

#endif
