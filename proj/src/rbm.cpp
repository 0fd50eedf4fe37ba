#include "rbmtomo/rbm.hpp"

#include <cmath>

namespace rbmtomo {

void RbmParams::validate() const {
    if (weights.rows() != hidden_bias.size() || weights.cols() != visible_bias.size())
        throw ArgumentError("RbmParams: inconsistent dimensions");
    if (!weights.allFinite() || !visible_bias.allFinite() || !hidden_bias.allFinite())
        throw NumericError("RbmParams: non-finite parameter");
}

RbmParams RbmParams::init(int n_visible, int n_hidden, std::uint64_t seed) {
    if (n_visible < 1 || n_hidden < 1) throw ArgumentError("RbmParams: layer sizes must be >= 1");
    Rng rng(seed, /*stream=*/0xF17);
    RbmParams rbm;
    rbm.weights.resize(n_hidden, n_visible);
    for (int j = 0; j < n_hidden; ++j)
        for (int i = 0; i < n_visible; ++i) rbm.weights(j, i) = 0.01 * rng.gaussian();
    rbm.visible_bias = Eigen::VectorXd::Zero(n_visible);
    rbm.hidden_bias = Eigen::VectorXd::Zero(n_hidden);
    return rbm;
}

double softplus(double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

namespace {

inline Eigen::ArrayXXd softplus_array(const Eigen::ArrayXXd& x) {
    return x.max(0.0) + (-x.abs()).exp().log1p();
}

inline Eigen::ArrayXXd sigmoid_array(const Eigen::ArrayXXd& x) {
    return 0.5 * (1.0 + (0.5 * x).tanh());
}

Eigen::VectorXd bits_vector(BasisIndex sigma, int n) {
    Eigen::VectorXd v(n);
    for (int i = 1; i <= n; ++i) v(i - 1) = bit_at(sigma, i, n);
    return v;
}

} // namespace

double effective_energy(const RbmParams& rbm, BasisIndex sigma) {
    const int n = rbm.n_visible();
    double e = 0.0;
    Eigen::VectorXd act = rbm.hidden_bias;
    for (int i = 1; i <= n; ++i) {
        if (!bit_at(sigma, i, n)) continue;
        e += rbm.visible_bias(i - 1);
        act += rbm.weights.col(i - 1);
    }
    for (int j = 0; j < rbm.n_hidden(); ++j) e += softplus(act(j));
    return e;
}

Eigen::VectorXd effective_energies(const RbmParams& rbm, const Eigen::MatrixXd& visible) {
    Eigen::MatrixXd act = rbm.weights * visible;
    act.colwise() += rbm.hidden_bias;
    Eigen::VectorXd e = softplus_array(act.array()).colwise().sum().transpose();
    e.noalias() += visible.transpose() * rbm.visible_bias;
    return e;
}

Eigen::VectorXd effective_energy_table(const RbmParams& rbm) {
    const int n = rbm.n_visible();
    if (n > kEnumerationCap) throw ResourceError("effective_energy_table: N exceeds enumeration cap");
    const Eigen::Index dim = Eigen::Index{1} << n;
    // Chunked so the intermediate activation matrix stays small for N ~ 20.
    const Eigen::Index chunk = std::min<Eigen::Index>(dim, Eigen::Index{1} << 14);
    Eigen::VectorXd table(dim);
    Eigen::MatrixXd cols(n, chunk);
    for (Eigen::Index start = 0; start < dim; start += chunk) {
        const Eigen::Index count = std::min(chunk, dim - start);
        for (Eigen::Index m = 0; m < count; ++m) {
            const auto s = static_cast<BasisIndex>(start + m);
            for (int i = 1; i <= n; ++i) cols(i - 1, m) = bit_at(s, i, n);
        }
        table.segment(start, count) = effective_energies(rbm, cols.leftCols(count));
    }
    return table;
}

double log_partition_exact(const RbmParams& rbm) {
    const Eigen::VectorXd e = effective_energy_table(rbm);
    const double m = e.maxCoeff();
    return m + std::log((e.array() - m).exp().sum());
}

double probability_exact(const RbmParams& rbm, BasisIndex sigma) {
    return std::exp(effective_energy(rbm, sigma) - log_partition_exact(rbm));
}

double amplitude(const RbmParams& rbm, BasisIndex sigma) {
    return std::exp(0.5 * (effective_energy(rbm, sigma) - log_partition_exact(rbm)));
}

Eigen::VectorXd probability_table(const RbmParams& rbm) {
    Eigen::VectorXd e = effective_energy_table(rbm);
    const double m = e.maxCoeff();
    Eigen::VectorXd p = (e.array() - m).exp();
    return p / p.sum();
}

Eigen::VectorXd conditional_hidden(const RbmParams& rbm, BasisIndex sigma) {
    const int n = rbm.n_visible();
    Eigen::VectorXd act = rbm.hidden_bias;
    for (int i = 1; i <= n; ++i)
        if (bit_at(sigma, i, n)) act += rbm.weights.col(i - 1);
    return sigmoid_array(act.array());
}

Eigen::VectorXd conditional_visible(const RbmParams& rbm, const Eigen::VectorXd& hidden) {
    if (hidden.size() != rbm.n_hidden())
        throw ArgumentError("conditional_visible: hidden vector has wrong length");
    Eigen::VectorXd act = rbm.weights.transpose() * hidden + rbm.visible_bias;
    return sigmoid_array(act.array());
}

GibbsSampler::GibbsSampler(const RbmParams& rbm, int n_chains, std::uint64_t seed,
                           std::uint64_t stream_offset)
    : rbm_(rbm) {
    if (n_chains < 1) throw ArgumentError("GibbsSampler: need at least one chain");
    v_.resize(rbm.n_visible(), n_chains);
    h_.resize(rbm.n_hidden(), n_chains);
    chain_rng_.reserve(static_cast<std::size_t>(n_chains));
    for (int c = 0; c < n_chains; ++c)
        chain_rng_.emplace_back(seed, stream_offset + static_cast<std::uint64_t>(c));
}

void GibbsSampler::set_visible(const Eigen::MatrixXd& visible) {
    if (visible.rows() != v_.rows() || visible.cols() != v_.cols())
        throw ArgumentError("GibbsSampler: visible block has wrong shape");
    v_ = visible;
}

void GibbsSampler::init_uniform() {
    for (Eigen::Index c = 0; c < v_.cols(); ++c) {
        Rng& rng = chain_rng_[static_cast<std::size_t>(c)];
        for (Eigen::Index i = 0; i < v_.rows(); ++i) v_(i, c) = rng.bernoulli(0.5) ? 1.0 : 0.0;
    }
}

void GibbsSampler::sample_layer(const Eigen::MatrixXd& means, Eigen::MatrixXd& out) {
    for (Eigen::Index c = 0; c < means.cols(); ++c) {
        Rng& rng = chain_rng_[static_cast<std::size_t>(c)];
        for (Eigen::Index u = 0; u < means.rows(); ++u)
            out(u, c) = rng.uniform() < means(u, c) ? 1.0 : 0.0;
    }
}

Eigen::MatrixXd GibbsSampler::hidden_means() const {
    Eigen::MatrixXd act = rbm_.weights * v_;
    act.colwise() += rbm_.hidden_bias;
    return sigmoid_array(act.array());
}

void GibbsSampler::sweep(int k) {
    Eigen::MatrixXd act;
    for (int step = 0; step < k; ++step) {
        act = rbm_.weights * v_;
        act.colwise() += rbm_.hidden_bias;
        act = sigmoid_array(act.array());
        sample_layer(act, h_);

        act = rbm_.weights.transpose() * h_;
        act.colwise() += rbm_.visible_bias;
        act = sigmoid_array(act.array());
        sample_layer(act, v_);
    }
}

void GibbsSampler::sweep_clamped(int k, const Eigen::MatrixXd& r1, const Eigen::MatrixXd& r0) {
    if (r1.rows() != v_.rows() || r1.cols() != v_.cols() || r0.rows() != v_.rows() ||
        r0.cols() != v_.cols())
        throw ArgumentError("GibbsSampler: channel factor blocks have wrong shape");
    Eigen::MatrixXd act;
    for (int step = 0; step < k; ++step) {
        act = rbm_.weights * v_;
        act.colwise() += rbm_.hidden_bias;
        act = sigmoid_array(act.array());
        sample_layer(act, h_);

        act = rbm_.weights.transpose() * h_;
        act.colwise() += rbm_.visible_bias;
        act = sigmoid_array(act.array());
        // Bayes posterior per site given the clamped record
        act.array() = r1.array() * act.array() /
                      (r1.array() * act.array() + r0.array() * (1.0 - act.array()));
        sample_layer(act, v_);
    }
}

std::vector<BasisIndex> gibbs_sample(const RbmParams& rbm, int n_chains, int k, std::uint64_t seed,
                                     const std::optional<std::vector<BasisIndex>>& init) {
    if (k < 1) throw ArgumentError("gibbs_sample: k must be >= 1");
    GibbsSampler sampler(rbm, n_chains, seed);
    if (init.has_value()) {
        if (init->empty()) throw ArgumentError("gibbs_sample: empty init dataset");
        Eigen::MatrixXd v(rbm.n_visible(), n_chains);
        for (int c = 0; c < n_chains; ++c)
            v.col(c) = bits_vector((*init)[static_cast<std::size_t>(c) % init->size()],
                                   rbm.n_visible());
        sampler.set_visible(v);
    } else {
        sampler.init_uniform();
    }
    sampler.sweep(k);
    std::vector<BasisIndex> out(static_cast<std::size_t>(n_chains));
    for (int c = 0; c < n_chains; ++c)
        out[static_cast<std::size_t>(c)] = column_to_index(sampler.visible(), c);
    return out;
}

Eigen::VectorXd column_to_vector(const Eigen::MatrixXd& cols, int j) { return cols.col(j); }

BasisIndex column_to_index(const Eigen::MatrixXd& cols, int j) {
    BasisIndex s = 0;
    for (Eigen::Index i = 0; i < cols.rows(); ++i)
        s = (s << 1) | static_cast<BasisIndex>(cols(i, j) > 0.5);
    return s;
}

Eigen::MatrixXd indices_to_columns(const std::vector<BasisIndex>& idx, int n_sites) {
    Eigen::MatrixXd cols(n_sites, static_cast<Eigen::Index>(idx.size()));
    for (Eigen::Index m = 0; m < cols.cols(); ++m)
        cols.col(m) = bits_vector(idx[static_cast<std::size_t>(m)], n_sites);
    return cols;
}

} // namespace rbmtomo
