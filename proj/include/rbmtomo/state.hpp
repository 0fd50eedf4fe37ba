#ifndef RBMTOMO_STATE_HPP
#define RBMTOMO_STATE_HPP

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

#include "rbmtomo/common.hpp"
#include "rbmtomo/dataset.hpp"

namespace rbmtomo {

/// Dense pure state vector or density operator over the occupation basis.
/// Pure states are stored as complex vectors of length 2^N, mixed states as
/// 2^N x 2^N complex matrices.
class QuantumState {
  public:
    QuantumState() = default; // empty; fill via the factories below
    static QuantumState pure(int n_sites, Eigen::VectorXcd amplitudes);
    static QuantumState mixed(int n_sites, Eigen::MatrixXcd density);

    int n_sites() const { return n_sites_; }
    bool is_pure() const { return pure_; }
    Eigen::Index dim() const { return pure_ ? vec_.size() : rho_.rows(); }

    const Eigen::VectorXcd& amplitudes() const;
    const Eigen::MatrixXcd& density() const;

    /// Dense density operator view (outer product for pure states).
    Eigen::MatrixXcd density_matrix() const;

    /// Measurement distribution p(sigma): |psi|^2 or Re diag(rho), clipped at 0.
    Eigen::VectorXd probabilities() const;

    double purity() const; // Tr rho^2 (1 for pure states)

    /// Checks the structural invariants (norm / Hermiticity / trace / spectrum)
    /// and throws NumericError on violation.
    void validate(double tol = 1e-10, double eig_tol = 1e-9) const;

  private:
    int n_sites_ = 0;
    bool pure_ = true;
    Eigen::VectorXcd vec_;
    Eigen::MatrixXcd rho_;
};

/// Reduced operator on `keep` (1-based site labels, any order given, treated
/// as the sorted subset). Output basis ordering follows the global convention
/// restricted to the kept sites.
QuantumState partial_trace(const QuantumState& state, const std::vector<int>& keep);

/// Renyi entropy S_n = log(Tr rho^n) / (1-n) in nats, n >= 2.
double renyi_entropy(const QuantumState& state, int n);

/// S_n(rho_A) + S_n(rho_B) - S_n(rho) for the bipartition A = {1..s}.
double mutual_information_exact(const QuantumState& state, int cut_bond, int n);

/// Uhlmann fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)); |<a|b>| when both pure.
double fidelity(const QuantumState& a, const QuantumState& b);

/// Spatial average of window fidelities over all contiguous windows of size s.
double subsystem_avg_fidelity(const QuantumState& a, const QuantumState& b, int s);

/// Pure state with amplitudes sqrt(<sigma|rho|sigma>).
QuantumState positive_pure_partner(const QuantumState& state);

/// i.i.d. projective measurements in the occupation basis.
Dataset sample_measurements(const QuantumState& state, std::int64_t n_samples,
                            std::uint64_t seed, const std::string& source = "state");

} // namespace rbmtomo

#endif
