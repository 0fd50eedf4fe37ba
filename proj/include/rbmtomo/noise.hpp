#ifndef RBMTOMO_NOISE_HPP
#define RBMTOMO_NOISE_HPP

#include <Eigen/Dense>
#include <cstdint>

#include "rbmtomo/dataset.hpp"
#include "rbmtomo/rbm.hpp"

namespace rbmtomo {

/// Factorized bit-flip measurement channel. p10 = p(record 1 | true 0),
/// p01 = p(record 0 | true 1), uniform across sites.
struct NoiseModel {
    double p10 = 0.0;
    double p01 = 0.0;

    bool is_zero() const { return p10 == 0.0 && p01 == 0.0; }
    void validate() const;

    double p_tau_given_sigma(int tau, int sigma) const {
        if (sigma == 0) return tau == 1 ? p10 : 1.0 - p10;
        return tau == 0 ? p01 : 1.0 - p01;
    }
};

/// Couplings of the exponential-form noise layer, exp(bs*s + bt*t + w*s*t)/Z
/// with Z = 1/p(0|0) per site.
struct NoiseCouplings {
    double w_tilde = 0.0;
    double b_sigma = 0.0;
    double b_tau = 0.0;
};

/// prod_j p(tau_j | sigma_j).
double channel_prob(BasisIndex tau, BasisIndex sigma, int n_sites, const NoiseModel& nm);

/// Independent per-bit flips with the channel rates; records the rates and
/// seed in the output metadata.
Dataset corrupt_dataset(const Dataset& d, const NoiseModel& nm, std::uint64_t seed);

/// Applies the single-site channel matrix to a probability table over sigma,
/// returning the table over tau.
Eigen::VectorXd push_through_channel(const Eigen::VectorXd& p_sigma, int n_sites,
                                     const NoiseModel& nm);

/// p~(tau) = sum_sigma p(tau|sigma) p(sigma) for all tau (N <= 16).
Eigen::VectorXd corrupted_distribution_exact(const RbmParams& rbm, const NoiseModel& nm);

/// Per-site Bernoulli means of p~(sigma | tau, h); equals conditional_visible
/// when the rates vanish.
Eigen::VectorXd clamped_visible_conditional(const RbmParams& rbm, const NoiseModel& nm,
                                            BasisIndex tau, const Eigen::VectorXd& hidden);

/// W~ = log[p(1|1)p(0|0) / (p(1|0)p(0|1))], b~_sigma = log[p(0|1)/p(0|0)],
/// b~_tau = log[p(1|0)/p(0|0)]. Throws NumericError when any conditional
/// probability vanishes (zero-rate channels bypass the noise layer instead).
NoiseCouplings effective_couplings(const NoiseModel& nm);

} // namespace rbmtomo

#endif
