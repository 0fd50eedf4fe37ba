#include "rbmtomo/fd_model.hpp"

#include <cmath>

namespace rbmtomo {

double FdModel::probability(BasisIndex tau) const {
    const auto it = table.find(tau);
    if (it == table.end()) return 0.0;
    return static_cast<double>(it->second) / static_cast<double>(n_samples);
}

FdModel build_fd(const Dataset& d) {
    if (d.samples.empty()) throw ArgumentError("build_fd: empty dataset");
    FdModel fd;
    fd.n_sites = d.meta.n_sites;
    fd.n_samples = d.size();
    for (BasisIndex s : d.samples) ++fd.table[s];
    return fd;
}

double classical_fidelity(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
    if (p.size() != q.size()) throw ArgumentError("classical_fidelity: support mismatch");
    if (std::abs(p.sum() - 1.0) > 1e-8 || std::abs(q.sum() - 1.0) > 1e-8)
        throw ArgumentError("classical_fidelity: inputs must be normalized");
    double f = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        f += std::sqrt(std::max(p(i), 0.0) * std::max(q(i), 0.0));
    return std::min(f, 1.0);
}

double fd_state_fidelity(const FdModel& fd, const QuantumState& truth) {
    if (!truth.is_pure())
        throw ArgumentError("fd_state_fidelity: truth must be pure (use its positive partner)");
    if (truth.n_sites() != fd.n_sites) throw ArgumentError("fd_state_fidelity: size mismatch");
    const Eigen::VectorXcd& amps = truth.amplitudes();
    for (Eigen::Index i = 0; i < amps.size(); ++i)
        if (amps(i).real() < -1e-9 || std::abs(amps(i).imag()) > 1e-9)
            throw ArgumentError("fd_state_fidelity: truth amplitudes must be nonnegative real");
    // sparse sum over observed strings only
    double f = 0.0;
    for (const auto& [tau, count] : fd.table)
        f += std::sqrt(static_cast<double>(count) / static_cast<double>(fd.n_samples)) *
             std::abs(amps(tau));
    return std::min(f, 1.0);
}

double fidelity_bound(std::int64_t n_samples, double h2) {
    if (h2 < 0.0) throw ArgumentError("fidelity_bound: h2 must be nonnegative");
    return std::sqrt(static_cast<double>(n_samples)) * std::exp(-h2 / 4.0);
}

double collision_entropy(const Eigen::VectorXd& p) {
    const double s2 = p.squaredNorm();
    if (s2 <= 0.0) throw ArgumentError("collision_entropy: zero distribution");
    return -std::log(s2);
}

std::int64_t model_size(const FdModel& fd) { return fd.distinct(); }

std::int64_t model_size(const RbmParams& rbm) { return rbm.n_parameters(); }

} // namespace rbmtomo
