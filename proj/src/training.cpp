#include "rbmtomo/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <numeric>

namespace rbmtomo {

void TrainConfig::validate() const {
    if (n_hidden < 0) throw ArgumentError("TrainConfig: n_hidden must be >= 0");
    if (learning_rate <= 0.0) throw ArgumentError("TrainConfig: learning_rate must be positive");
    if (lr_decay <= 0.0 || lr_decay > 1.0)
        throw ArgumentError("TrainConfig: lr_decay must be in (0, 1]");
    if (batch_size < 1) throw ArgumentError("TrainConfig: batch_size must be >= 1");
    if (cd_steps < 1) throw ArgumentError("TrainConfig: cd_steps must be >= 1");
    if (epochs < 1) throw ArgumentError("TrainConfig: epochs must be >= 1");
    if (validation_split < 0.0 || validation_split >= 1.0)
        throw ArgumentError("TrainConfig: validation_split must be in [0, 1)");
    if (noise) noise->validate();
}

double GradientRecord::max_abs() const {
    return std::max({d_weights.cwiseAbs().maxCoeff(), d_visible_bias.cwiseAbs().maxCoeff(),
                     d_hidden_bias.cwiseAbs().maxCoeff()});
}

double GradientRecord::norm() const {
    return std::sqrt(d_weights.squaredNorm() + d_visible_bias.squaredNorm() +
                     d_hidden_bias.squaredNorm());
}

GradientRecord& GradientRecord::operator-=(const GradientRecord& o) {
    d_weights -= o.d_weights;
    d_visible_bias -= o.d_visible_bias;
    d_hidden_bias -= o.d_hidden_bias;
    return *this;
}

GradientRecord& GradientRecord::operator*=(double f) {
    d_weights *= f;
    d_visible_bias *= f;
    d_hidden_bias *= f;
    return *this;
}

namespace {

inline Eigen::ArrayXXd sigmoid_array(const Eigen::ArrayXXd& x) {
    return 0.5 * (1.0 + (0.5 * x).tanh());
}

// Mean of the effective-energy gradient over weighted visible columns.
// d/db = sigma, d/dc = sigmoid(W sigma + c), d/dW = sigmoid(..) sigma^T.
GradientRecord mean_energy_gradient(const RbmParams& rbm, const Eigen::MatrixXd& visible,
                                    const Eigen::VectorXd& weights) {
    Eigen::MatrixXd act = rbm.weights * visible;
    act.colwise() += rbm.hidden_bias;
    Eigen::MatrixXd hidden = sigmoid_array(act.array());

    GradientRecord g;
    g.d_weights.noalias() = hidden * weights.asDiagonal() * visible.transpose();
    g.d_visible_bias.noalias() = visible * weights;
    g.d_hidden_bias.noalias() = hidden * weights;
    return g;
}

GradientRecord mean_energy_gradient(const RbmParams& rbm, const Eigen::MatrixXd& visible) {
    const double w = 1.0 / static_cast<double>(visible.cols());
    return mean_energy_gradient(rbm, visible,
                                Eigen::VectorXd::Constant(visible.cols(), w));
}

Eigen::MatrixXd enumeration_columns(int n) {
    const Eigen::Index dim = Eigen::Index{1} << n;
    Eigen::MatrixXd cols(n, dim);
    for (Eigen::Index s = 0; s < dim; ++s)
        for (int i = 1; i <= n; ++i) cols(i - 1, s) = bit_at(static_cast<BasisIndex>(s), i, n);
    return cols;
}

const NoiseModel* active_noise(const std::optional<NoiseModel>& nm) {
    if (!nm.has_value() || nm->is_zero()) return nullptr; // zero rates bypass the channel
    return &*nm;
}

} // namespace

double nll_exact_weighted(const RbmParams& rbm, const Eigen::VectorXd& weights,
                          const std::optional<NoiseModel>& nm) {
    const int n = rbm.n_visible();
    if (n > kEnumerationCap) throw ResourceError("nll_exact: N exceeds enumeration cap");
    if (weights.size() != (Eigen::Index{1} << n))
        throw ArgumentError("nll_exact_weighted: weights must cover all configurations");

    Eigen::VectorXd log_p;
    const Eigen::VectorXd e = effective_energy_table(rbm);
    const double m = e.maxCoeff();
    const double log_z = m + std::log((e.array() - m).exp().sum());
    if (const NoiseModel* channel = active_noise(nm)) {
        Eigen::VectorXd p = (e.array() - log_z).exp();
        Eigen::VectorXd p_tau = push_through_channel(p, n, *channel);
        log_p = p_tau.array().max(1e-300).log();
    } else {
        log_p = e.array() - log_z;
    }
    return -weights.dot(log_p);
}

double nll_exact(const RbmParams& rbm, const Dataset& d, const std::optional<NoiseModel>& nm) {
    if (d.samples.empty()) throw ArgumentError("nll_exact: empty dataset");
    return nll_exact_weighted(rbm, d.empirical_distribution(), nm);
}

GradientRecord grad_exact_weighted(const RbmParams& rbm, const Eigen::VectorXd& weights,
                                   const std::optional<NoiseModel>& nm) {
    const int n = rbm.n_visible();
    if (n > kEnumerationCap) throw ResourceError("grad_exact: N exceeds enumeration cap");
    const Eigen::Index dim = Eigen::Index{1} << n;
    if (weights.size() != dim)
        throw ArgumentError("grad_exact_weighted: weights must cover all configurations");

    const Eigen::MatrixXd cols = enumeration_columns(n);
    const Eigen::VectorXd p = probability_table(rbm);
    GradientRecord model_term = mean_energy_gradient(rbm, cols, p);

    GradientRecord data_term;
    if (const NoiseModel* channel = active_noise(nm)) {
        // Data term: sum_tau w(tau) <dE>_{p(sigma|tau)}. The posterior columns
        // reuse the prior table: p(sigma|tau) ~ p(tau|sigma) p(sigma).
        Eigen::VectorXd post_weights = Eigen::VectorXd::Zero(dim);
        for (Eigen::Index tau = 0; tau < dim; ++tau) {
            if (weights(tau) == 0.0) continue;
            Eigen::VectorXd post(dim);
            for (Eigen::Index sigma = 0; sigma < dim; ++sigma)
                post(sigma) = channel_prob(static_cast<BasisIndex>(tau),
                                           static_cast<BasisIndex>(sigma), n, *channel) *
                              p(sigma);
            post /= post.sum();
            post_weights += weights(tau) * post;
        }
        data_term = mean_energy_gradient(rbm, cols, post_weights);
    } else {
        data_term = mean_energy_gradient(rbm, cols, weights);
    }

    model_term -= data_term;
    return model_term;
}

GradientRecord grad_exact(const RbmParams& rbm, const Dataset& d,
                          const std::optional<NoiseModel>& nm) {
    if (d.samples.empty()) throw ArgumentError("grad_exact: empty dataset");
    return grad_exact_weighted(rbm, d.empirical_distribution(), nm);
}

GradientRecord cd_gradient(const RbmParams& rbm, const std::vector<BasisIndex>& batch, int n_sites,
                           int k, const std::optional<NoiseModel>& nm, std::uint64_t seed,
                           std::uint64_t stream_offset) {
    if (batch.empty()) throw ArgumentError("cd_gradient: empty batch");
    const Eigen::MatrixXd data = indices_to_columns(batch, n_sites);
    const int m = static_cast<int>(batch.size());
    const NoiseModel* channel = active_noise(nm);

    GradientRecord positive;
    if (channel) {
        // Clamped chains: per-entry channel factors for tau fixed at the data.
        Eigen::MatrixXd r1(n_sites, m), r0(n_sites, m);
        for (int c = 0; c < m; ++c) {
            for (int i = 0; i < n_sites; ++i) {
                const int tau = data(i, c) > 0.5 ? 1 : 0;
                r1(i, c) = channel->p_tau_given_sigma(tau, 1);
                r0(i, c) = channel->p_tau_given_sigma(tau, 0);
            }
        }
        GibbsSampler clamped(rbm, m, seed, stream_offset);
        clamped.set_visible(data);
        clamped.sweep_clamped(k, r1, r0);
        positive = mean_energy_gradient(rbm, clamped.visible());
    } else {
        positive = mean_energy_gradient(rbm, data);
    }

    GibbsSampler chains(rbm, m, seed, stream_offset + static_cast<std::uint64_t>(m));
    chains.set_visible(data);
    chains.sweep(k);
    GradientRecord negative = mean_energy_gradient(rbm, chains.visible());

    negative -= positive; // dL = <dE>_model - <dE>_data
    return negative;
}

TrainReport train(const Dataset& d, const TrainConfig& cfg) {
    cfg.validate();
    if (d.samples.empty()) throw ArgumentError("train: empty dataset");
    const int n = d.meta.n_sites;
    const int n_hidden = cfg.n_hidden > 0 ? cfg.n_hidden : 2 * n;
    const auto t_start = std::chrono::steady_clock::now();

    // Deterministic validation split: shuffle indices with a dedicated stream.
    std::vector<std::size_t> order(d.samples.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng split_rng(cfg.seed, /*stream=*/0x5B117);
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[static_cast<std::size_t>(split_rng.uniform() * i)]);
    const auto n_val = static_cast<std::size_t>(cfg.validation_split * order.size());
    std::vector<BasisIndex> train_set, val_set;
    for (std::size_t i = 0; i < order.size(); ++i)
        (i < n_val ? val_set : train_set).push_back(d.samples[order[i]]);
    if (train_set.empty()) throw ArgumentError("train: validation split leaves no training data");

    Dataset train_data = make_dataset(n, train_set, d.meta);
    Dataset val_data = val_set.empty() ? Dataset{} : make_dataset(n, val_set, d.meta);

    RbmParams rbm = RbmParams::init(n, n_hidden, cfg.seed);
    const bool track_nll = cfg.nll_interval > 0 && n <= kEnumerationCap;
    const std::optional<NoiseModel> channel =
        active_noise(cfg.noise) ? cfg.noise : std::optional<NoiseModel>{};

    TrainReport report;
    double lr = cfg.learning_rate;
    const auto n_batches =
        (train_set.size() + static_cast<std::size_t>(cfg.batch_size) - 1) /
        static_cast<std::size_t>(cfg.batch_size);

    std::vector<std::size_t> perm(train_set.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        Rng shuffle_rng(cfg.seed, 0xE90C4 + static_cast<std::uint64_t>(epoch));
        for (std::size_t i = perm.size(); i > 1; --i)
            std::swap(perm[i - 1], perm[static_cast<std::size_t>(shuffle_rng.uniform() * i)]);

        const bool epoch_uses_noise =
            channel.has_value() && !(cfg.noise_free_first_epoch && epoch == 0);
        double grad_norm_acc = 0.0;

        for (std::size_t b = 0; b < n_batches; ++b) {
            const std::size_t lo = b * static_cast<std::size_t>(cfg.batch_size);
            const std::size_t hi = std::min(lo + static_cast<std::size_t>(cfg.batch_size),
                                            train_set.size());
            std::vector<BasisIndex> batch;
            batch.reserve(hi - lo);
            for (std::size_t i = lo; i < hi; ++i) batch.push_back(train_set[perm[i]]);

            // Chain streams keyed by (epoch, batch, slot) so per-entry work is
            // order-independent.
            const std::uint64_t stream_base =
                (static_cast<std::uint64_t>(epoch) * n_batches + b) *
                (2ULL * static_cast<std::uint64_t>(cfg.batch_size));
            GradientRecord g = cd_gradient(rbm, batch, n,
                                           cfg.cd_steps,
                                           epoch_uses_noise ? channel : std::nullopt,
                                           cfg.seed, stream_base);
            grad_norm_acc += g.norm();
            rbm.weights -= lr * g.d_weights;
            rbm.visible_bias -= lr * g.d_visible_bias;
            rbm.hidden_bias -= lr * g.d_hidden_bias;

            if (!rbm.weights.allFinite() || !rbm.visible_bias.allFinite() ||
                !rbm.hidden_bias.allFinite()) {
                report.final_params = rbm;
                throw NumericError("train: parameters became non-finite at epoch " +
                                   std::to_string(epoch) + ", batch " + std::to_string(b));
            }
        }

        report.grad_norm.push_back(grad_norm_acc / static_cast<double>(n_batches));
        report.lr.push_back(lr);
        lr *= cfg.lr_decay;

        if (track_nll && (epoch % cfg.nll_interval == 0 || epoch == cfg.epochs - 1)) {
            report.nll_epochs.push_back(epoch);
            report.nll.push_back(nll_exact(rbm, train_data, channel));
            report.val_nll.push_back(val_set.empty() ? std::nan("")
                                                     : nll_exact(rbm, val_data, channel));
        }
        if (cfg.epochs - epoch <= cfg.snapshot_count) report.snapshots.push_back(rbm);
    }

    // Diagnostic: validation NLL should not climb over the final quartile.
    if (track_nll && !val_set.empty() && report.val_nll.size() >= 8) {
        const std::size_t q = report.val_nll.size() - report.val_nll.size() / 4;
        const double at_quartile = report.val_nll[q - 1];
        const double at_end = report.val_nll.back();
        if (at_end > at_quartile + cfg.val_drift_tol) {
            report.val_drift_warning = true;
            std::cerr << "[rbmtomo] warning: validation NLL rose from " << at_quartile << " to "
                      << at_end << " over the final quartile\n";
        }
    }

    report.final_params = rbm;
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return report;
}

} // namespace rbmtomo
