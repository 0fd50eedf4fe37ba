#ifndef RBMTOMO_RBM_HPP
#define RBMTOMO_RBM_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "rbmtomo/common.hpp"
#include "rbmtomo/dataset.hpp"

namespace rbmtomo {

/// Exact-enumeration cap: tables over 2^N configurations are only built up to
/// this many sites.
constexpr int kEnumerationCap = 20;

/// Binary-unit restricted Boltzmann machine over {0,1} visible/hidden layers.
/// p(sigma) = exp(E_eff(sigma)) / Z with
/// E_eff(sigma) = b.sigma + sum_j softplus(w_j.sigma + c_j).
struct RbmParams {
    Eigen::MatrixXd weights;      // N_h x N
    Eigen::VectorXd visible_bias; // N
    Eigen::VectorXd hidden_bias;  // N_h

    int n_visible() const { return static_cast<int>(visible_bias.size()); }
    int n_hidden() const { return static_cast<int>(hidden_bias.size()); }
    int n_parameters() const { return n_visible() * n_hidden() + n_visible() + n_hidden(); }

    void validate() const;

    /// Weights ~ N(0, 0.01^2), biases zero.
    static RbmParams init(int n_visible, int n_hidden, std::uint64_t seed);
};

double softplus(double x);

/// E_eff for one configuration.
double effective_energy(const RbmParams& rbm, BasisIndex sigma);

/// E_eff for a batch of visible columns (N x M) -> length-M vector.
Eigen::VectorXd effective_energies(const RbmParams& rbm, const Eigen::MatrixXd& visible);

/// E_eff over all 2^N configurations, in basis order.
Eigen::VectorXd effective_energy_table(const RbmParams& rbm);

/// log Z by running log-sum-exp over the full configuration table.
double log_partition_exact(const RbmParams& rbm);

double probability_exact(const RbmParams& rbm, BasisIndex sigma);
double amplitude(const RbmParams& rbm, BasisIndex sigma);

/// p(sigma) for all configurations; sums to 1.
Eigen::VectorXd probability_table(const RbmParams& rbm);

/// Per-unit Bernoulli means sigmoid(W sigma + c) / sigmoid(W^T h + b).
Eigen::VectorXd conditional_hidden(const RbmParams& rbm, BasisIndex sigma);
Eigen::VectorXd conditional_visible(const RbmParams& rbm, const Eigen::VectorXd& hidden);

/// Batched block Gibbs sampler. Chains are columns; each chain owns an RNG
/// stream derived from (seed, stream_offset + chain), drawn hidden-layer
/// first, unit index order within a layer.
class GibbsSampler {
  public:
    GibbsSampler(const RbmParams& rbm, int n_chains, std::uint64_t seed,
                 std::uint64_t stream_offset = 0);

    /// Chains start from the given visible columns (N x n_chains).
    void set_visible(const Eigen::MatrixXd& visible);
    /// Chains start from per-unit fair coin flips.
    void init_uniform();

    /// k alternating block sweeps h ~ p(h|v), v ~ p(v|h).
    void sweep(int k);

    /// Same, but the visible update is the posterior clamped to records tau:
    /// p(v_i=1 | h, tau_i) ~ p(tau_i|1) p(v_i=1|h). The per-entry channel
    /// factors are column-aligned with the chains.
    void sweep_clamped(int k, const Eigen::MatrixXd& r1, const Eigen::MatrixXd& r0);

    const Eigen::MatrixXd& visible() const { return v_; }
    /// Hidden-unit means sigmoid(W v + c) for the current visible states.
    Eigen::MatrixXd hidden_means() const;

  private:
    void sample_layer(const Eigen::MatrixXd& means, Eigen::MatrixXd& out);

    const RbmParams& rbm_;
    Eigen::MatrixXd v_; // N x chains
    Eigen::MatrixXd h_; // N_h x chains
    std::vector<Rng> chain_rng_;
};

/// Final visible states of n_chains independent chains after k block sweeps.
/// `init`: seed configurations cycled over chains; empty optional = uniform
/// random initialization.
std::vector<BasisIndex> gibbs_sample(const RbmParams& rbm, int n_chains, int k,
                                     std::uint64_t seed,
                                     const std::optional<std::vector<BasisIndex>>& init = std::nullopt);

Eigen::VectorXd column_to_vector(const Eigen::MatrixXd& cols, int j);
BasisIndex column_to_index(const Eigen::MatrixXd& cols, int j);
Eigen::MatrixXd indices_to_columns(const std::vector<BasisIndex>& idx, int n_sites);

} // namespace rbmtomo

#endif
