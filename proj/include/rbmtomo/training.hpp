#ifndef RBMTOMO_TRAINING_HPP
#define RBMTOMO_TRAINING_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "rbmtomo/dataset.hpp"
#include "rbmtomo/noise.hpp"
#include "rbmtomo/rbm.hpp"

namespace rbmtomo {

struct TrainConfig {
    int n_hidden = 0;           // 0: defaults to 2N
    double learning_rate = 0.05;
    double lr_decay = 0.998;    // multiplicative, per epoch
    int batch_size = 100;
    int cd_steps = 30;
    int epochs = 2000;
    std::uint64_t seed = 0;
    std::optional<NoiseModel> noise;
    bool noise_free_first_epoch = true;
    double validation_split = 0.1;
    int nll_interval = 1;       // exact-NLL recording cadence; 0 disables
    int snapshot_count = 10;    // parameter snapshots kept from the end
    double val_drift_tol = 0.05; // warning threshold on final-quartile val NLL

    void validate() const;
};

/// Gradient of the negative log-likelihood in parameter space.
struct GradientRecord {
    Eigen::MatrixXd d_weights;
    Eigen::VectorXd d_visible_bias;
    Eigen::VectorXd d_hidden_bias;

    double max_abs() const;
    double norm() const;
    GradientRecord& operator-=(const GradientRecord& o);
    GradientRecord& operator*=(double f);
};

struct TrainReport {
    std::vector<int> nll_epochs;     // epochs at which exact NLL was recorded
    std::vector<double> nll;         // exact training NLL (when N within cap)
    std::vector<double> val_nll;     // exact validation NLL, aligned with nll_epochs
    std::vector<double> grad_norm;   // per epoch
    std::vector<double> lr;          // per epoch
    std::vector<RbmParams> snapshots; // last snapshot_count epochs
    RbmParams final_params;
    double wall_time_s = 0.0;
    bool val_drift_warning = false;
    std::string config_hash;
};

/// -(1/|D|) sum_tau log p(tau), or log p~(tau) when a channel is given.
double nll_exact(const RbmParams& rbm, const Dataset& d,
                 const std::optional<NoiseModel>& nm = std::nullopt);

/// Weighted variant: the "dataset" is every configuration with the given
/// weights (must sum to 1).
double nll_exact_weighted(const RbmParams& rbm, const Eigen::VectorXd& weights,
                          const std::optional<NoiseModel>& nm = std::nullopt);

/// Exact-enumeration gradient of the NLL: <dE>_p - mean_tau [dE(tau)] for the
/// two-layer objective, with the data term replaced by the clamped-posterior
/// expectation <dE>_{p(sigma|tau)} in the three-layer case.
GradientRecord grad_exact(const RbmParams& rbm, const Dataset& d,
                          const std::optional<NoiseModel>& nm = std::nullopt);
GradientRecord grad_exact_weighted(const RbmParams& rbm, const Eigen::VectorXd& weights,
                                   const std::optional<NoiseModel>& nm = std::nullopt);

/// Contrastive-divergence gradient estimate on one minibatch. Negative-phase
/// chains are seeded at the batch entries and run k block sweeps; the
/// positive phase uses the data directly (two-layer) or k clamped sweeps per
/// entry (three-layer). Deterministic under (seed, stream_offset).
GradientRecord cd_gradient(const RbmParams& rbm, const std::vector<BasisIndex>& batch,
                           int n_sites, int k, const std::optional<NoiseModel>& nm,
                           std::uint64_t seed, std::uint64_t stream_offset = 0);

/// SGD over shuffled minibatches with per-epoch learning-rate decay.
TrainReport train(const Dataset& d, const TrainConfig& cfg);

} // namespace rbmtomo

#endif
