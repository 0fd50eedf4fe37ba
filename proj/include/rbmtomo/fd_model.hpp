#ifndef RBMTOMO_FD_MODEL_HPP
#define RBMTOMO_FD_MODEL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <map>

#include "rbmtomo/dataset.hpp"
#include "rbmtomo/rbm.hpp"
#include "rbmtomo/state.hpp"

namespace rbmtomo {

/// Frequency-distribution (lookup-table) model: the empirical distribution of
/// a dataset, interpreted as a positive pure state sqrt(P_FD).
struct FdModel {
    int n_sites = 0;
    std::map<BasisIndex, std::int64_t> table; // sorted for stable serialization
    std::int64_t n_samples = 0;

    double probability(BasisIndex tau) const;
    std::int64_t distinct() const { return static_cast<std::int64_t>(table.size()); }
};

FdModel build_fd(const Dataset& d);

/// sum_tau sqrt(p(tau) q(tau)); both tables must sum to 1 within 1e-8.
double classical_fidelity(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

/// Fidelity of the FD state onto a pure positive truth state; equals the
/// classical fidelity of P_FD against |psi|^2.
double fd_state_fidelity(const FdModel& fd, const QuantumState& truth);

/// sqrt(N_s) * exp(-h2/4): ceiling on the FD fidelity given the ground-truth
/// collision entropy h2 (nats).
double fidelity_bound(std::int64_t n_samples, double h2);

/// -log sum_tau p(tau)^2 of an exact distribution.
double collision_entropy(const Eigen::VectorXd& p);

std::int64_t model_size(const FdModel& fd);
std::int64_t model_size(const RbmParams& rbm);

} // namespace rbmtomo

#endif
