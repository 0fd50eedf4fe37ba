#include "rbmtomo/noise.hpp"

#include <cmath>

namespace rbmtomo {

void NoiseModel::validate() const {
    if (p10 < 0.0 || p10 >= 0.5 || p01 < 0.0 || p01 >= 0.5)
        throw ArgumentError("NoiseModel: rates must lie in [0, 0.5)");
    if (p10 == 1.0 - p01)
        throw ArgumentError("NoiseModel: degenerate channel (p10 == 1 - p01)");
}

double channel_prob(BasisIndex tau, BasisIndex sigma, int n_sites, const NoiseModel& nm) {
    double p = 1.0;
    for (int i = 1; i <= n_sites; ++i)
        p *= nm.p_tau_given_sigma(bit_at(tau, i, n_sites), bit_at(sigma, i, n_sites));
    return p;
}

Dataset corrupt_dataset(const Dataset& d, const NoiseModel& nm, std::uint64_t seed) {
    nm.validate();
    const int n = d.meta.n_sites;
    Dataset out = d;
    out.meta.p10 = nm.p10;
    out.meta.p01 = nm.p01;
    out.meta.seed = seed;
    out.meta.source = d.meta.source.empty() ? "corrupted" : d.meta.source + "+noise";
    if (nm.is_zero()) return out;
    // one RNG stream per sample keeps corruption order-independent
    for (std::size_t m = 0; m < out.samples.size(); ++m) {
        Rng rng(seed, static_cast<std::uint64_t>(m));
        BasisIndex s = out.samples[m];
        for (int i = 1; i <= n; ++i) {
            const double rate = bit_at(s, i, n) ? nm.p01 : nm.p10;
            if (rng.uniform() < rate) s = flip_site(s, i, n);
        }
        out.samples[m] = s;
    }
    return out;
}

Eigen::VectorXd push_through_channel(const Eigen::VectorXd& p_sigma, int n_sites,
                                     const NoiseModel& nm) {
    if (p_sigma.size() != (Eigen::Index{1} << n_sites))
        throw ArgumentError("push_through_channel: table size mismatch");
    // Apply the 2x2 site channel [[1-p10, p01], [p10, 1-p01]] along each axis.
    Eigen::VectorXd p = p_sigma;
    const double k00 = 1.0 - nm.p10, k01 = nm.p01, k10 = nm.p10, k11 = 1.0 - nm.p01;
    for (int i = 1; i <= n_sites; ++i) {
        const Eigen::Index m = Eigen::Index{1} << (n_sites - i);
        for (Eigen::Index base = 0; base < p.size(); base += 2 * m) {
            for (Eigen::Index lo = 0; lo < m; ++lo) {
                const double a = p(base + lo);     // sigma_i = 0
                const double b = p(base + m + lo); // sigma_i = 1
                p(base + lo) = k00 * a + k01 * b;
                p(base + m + lo) = k10 * a + k11 * b;
            }
        }
    }
    return p;
}

Eigen::VectorXd corrupted_distribution_exact(const RbmParams& rbm, const NoiseModel& nm) {
    const int n = rbm.n_visible();
    if (n > 16) throw ResourceError("corrupted_distribution_exact: N > 16 exceeds the cap");
    return push_through_channel(probability_table(rbm), n, nm);
}

Eigen::VectorXd clamped_visible_conditional(const RbmParams& rbm, const NoiseModel& nm,
                                            BasisIndex tau, const Eigen::VectorXd& hidden) {
    Eigen::VectorXd m = conditional_visible(rbm, hidden);
    if (nm.is_zero()) return m; // zero-rate channels bypass the noise layer
    const int n = rbm.n_visible();
    for (int i = 1; i <= n; ++i) {
        const int t = bit_at(tau, i, n);
        const double r1 = nm.p_tau_given_sigma(t, 1);
        const double r0 = nm.p_tau_given_sigma(t, 0);
        const double w1 = r1 * m(i - 1);
        m(i - 1) = w1 / (w1 + r0 * (1.0 - m(i - 1)));
    }
    return m;
}

NoiseCouplings effective_couplings(const NoiseModel& nm) {
    const double p00 = 1.0 - nm.p10, p11 = 1.0 - nm.p01;
    if (nm.p10 <= 0.0 || nm.p01 <= 0.0 || p00 <= 0.0 || p11 <= 0.0)
        throw NumericError("effective_couplings: infinite coupling for a zero-probability "
                           "transition; use the rate-free code path instead");
    NoiseCouplings c;
    c.w_tilde = std::log(p11 * p00 / (nm.p10 * nm.p01));
    c.b_sigma = std::log(nm.p01 / p00);
    c.b_tau = std::log(nm.p10 / p00);
    return c;
}

} // namespace rbmtomo
