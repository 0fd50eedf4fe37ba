#include "rbmtomo/estimators.hpp"

#include <cmath>
#include <numeric>

#include "rbmtomo/state.hpp"

namespace rbmtomo {

namespace {

double zval(int bit) { return bit ? 1.0 : -1.0; }

// Accumulates a stream of per-sample estimator vectors into equal-size bins;
// means and errors come from the bin scatter, which absorbs chain
// autocorrelation up to the bin length.
class Binner {
  public:
    Binner(int n_est, int bin_size) : bin_size_(bin_size), acc_(Eigen::VectorXd::Zero(n_est)) {}

    void add(const Eigen::VectorXd& values) {
        acc_ += values;
        if (++in_bin_ == bin_size_) {
            bins_.push_back(acc_ / bin_size_);
            acc_.setZero();
            in_bin_ = 0;
        }
        ++total_;
    }

    void flush_partial() {
        if (in_bin_ > 0) {
            bins_.push_back(acc_ / in_bin_);
            acc_.setZero();
            in_bin_ = 0;
        }
    }

    std::int64_t n_samples() const { return total_; }
    std::int64_t n_bins() const { return static_cast<std::int64_t>(bins_.size()); }

    Eigen::VectorXd mean() const {
        Eigen::VectorXd m = Eigen::VectorXd::Zero(bins_.front().size());
        for (const auto& b : bins_) m += b;
        return m / static_cast<double>(bins_.size());
    }

    Eigen::VectorXd std_error() const {
        const auto nb = static_cast<double>(bins_.size());
        Eigen::VectorXd m = mean();
        Eigen::VectorXd var = Eigen::VectorXd::Zero(m.size());
        for (const auto& b : bins_) var += (b - m).cwiseAbs2();
        if (bins_.size() < 2) return Eigen::VectorXd::Zero(m.size());
        return (var / (nb - 1.0) / nb).cwiseSqrt();
    }

    /// Delete-one-bin jackknife of a scalar function of the estimator means.
    template <typename Fn>
    std::pair<double, double> jackknife(Fn&& fn) const {
        const auto nb = static_cast<double>(bins_.size());
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(bins_.front().size());
        for (const auto& b : bins_) sum += b;
        const double full = fn(Eigen::VectorXd(sum / nb));
        if (bins_.size() < 2) return {full, 0.0};
        std::vector<double> loo;
        loo.reserve(bins_.size());
        double loo_mean = 0.0;
        for (const auto& b : bins_) {
            const double v = fn(Eigen::VectorXd((sum - b) / (nb - 1.0)));
            loo.push_back(v);
            loo_mean += v;
        }
        loo_mean /= nb;
        double var = 0.0;
        for (double v : loo) var += (v - loo_mean) * (v - loo_mean);
        return {full, std::sqrt((nb - 1.0) / nb * var)};
    }

  private:
    int bin_size_;
    int in_bin_ = 0;
    std::int64_t total_ = 0;
    Eigen::VectorXd acc_;
    std::vector<Eigen::VectorXd> bins_;
};

struct McPlan {
    int n_chains;
    int bins_per_chain;
    int bin_size;
    std::int64_t total() const {
        return static_cast<std::int64_t>(n_chains) * bins_per_chain * bin_size;
    }
};

McPlan plan_mc(const McOptions& mc) {
    if (mc.n_mc < 1) throw ArgumentError("McOptions: n_mc must be >= 1");
    McPlan p;
    p.n_chains = static_cast<int>(std::min<std::int64_t>(mc.n_chains, mc.n_mc));
    const auto per_chain = (mc.n_mc + p.n_chains - 1) / p.n_chains;
    p.bin_size = static_cast<int>(std::min<std::int64_t>(mc.bin_size, per_chain));
    p.bins_per_chain = static_cast<int>(std::max<std::int64_t>(1, per_chain / p.bin_size));
    return p;
}

// Runs block-Gibbs chains and feeds each recorded visible sample through
// `per_sample(column, index, out_values)`.
template <typename Fn>
Binner run_mc(const RbmParams& rbm, std::uint64_t seed, const McOptions& mc, int n_est,
              Fn&& per_sample) {
    const McPlan plan = plan_mc(mc);
    GibbsSampler sampler(rbm, plan.n_chains, seed);
    sampler.init_uniform();
    sampler.sweep(mc.burn_in);

    Binner binner(n_est, plan.bin_size);
    Eigen::VectorXd values(n_est);
    // record chain-major blocks so bins hold consecutive samples of one chain
    const int records = plan.bins_per_chain * plan.bin_size;
    std::vector<std::vector<Eigen::VectorXd>> per_chain(
        static_cast<std::size_t>(plan.n_chains));
    for (auto& v : per_chain) v.reserve(static_cast<std::size_t>(records));
    for (int r = 0; r < records; ++r) {
        sampler.sweep(1);
        for (int c = 0; c < plan.n_chains; ++c) {
            per_sample(sampler.visible().col(c), column_to_index(sampler.visible(), c), values);
            per_chain[static_cast<std::size_t>(c)].push_back(values);
        }
    }
    for (const auto& chain : per_chain)
        for (const auto& v : chain) binner.add(v);
    return binner;
}

// log psi(sigma') - log psi(sigma) = (E(sigma') - E(sigma)) / 2.
double half_energy_diff(const RbmParams& rbm, BasisIndex from, BasisIndex to) {
    return 0.5 * (effective_energy(rbm, to) - effective_energy(rbm, from));
}

void check_site(int i, int n) {
    if (i < 1 || i > n) throw ArgumentError("site index out of range");
}

ObservableResult from_binner(const Binner& b, int which, std::string name, std::string method,
                             std::vector<int> sites, std::uint64_t seed) {
    ObservableResult r;
    r.name = std::move(name);
    r.value = b.mean()(which);
    r.std_error = b.std_error()(which);
    r.n_samples = b.n_samples();
    r.method = std::move(method);
    r.sites = std::move(sites);
    r.seed = seed;
    return r;
}

} // namespace

ObservableResult diagonal_correlator(const Dataset& d, int i, int j) {
    const int n = d.meta.n_sites;
    check_site(i, n);
    check_site(j, n);
    if (d.samples.empty()) throw ArgumentError("diagonal_correlator: empty dataset");
    const auto m = static_cast<double>(d.samples.size());

    double si = 0.0, sj = 0.0, sij = 0.0;
    std::vector<double> zi(d.samples.size()), zj(d.samples.size());
    for (std::size_t k = 0; k < d.samples.size(); ++k) {
        zi[k] = zval(bit_at(d.samples[k], i, n));
        zj[k] = zval(bit_at(d.samples[k], j, n));
        si += zi[k];
        sj += zj[k];
        sij += zi[k] * zj[k];
    }
    const double value = sij / m - (si / m) * (sj / m);

    // delete-1 jackknife from the running sums
    double loo_mean = 0.0;
    std::vector<double> loo(d.samples.size());
    for (std::size_t k = 0; k < d.samples.size(); ++k) {
        const double mi = (si - zi[k]) / (m - 1.0);
        const double mj = (sj - zj[k]) / (m - 1.0);
        const double mij = (sij - zi[k] * zj[k]) / (m - 1.0);
        loo[k] = mij - mi * mj;
        loo_mean += loo[k];
    }
    loo_mean /= m;
    double var = 0.0;
    for (double v : loo) var += (v - loo_mean) * (v - loo_mean);

    ObservableResult r;
    r.name = "zz_connected";
    r.value = value;
    r.std_error = d.samples.size() > 1 ? std::sqrt((m - 1.0) / m * var) : 0.0;
    r.n_samples = d.size();
    r.method = "dataset";
    r.sites = {i, j};
    return r;
}

ObservableResult diagonal_correlator(const RbmParams& rbm, int i, int j) {
    const int n = rbm.n_visible();
    check_site(i, n);
    check_site(j, n);
    const Eigen::VectorXd p = probability_table(rbm);
    double ei = 0.0, ej = 0.0, eij = 0.0;
    for (Eigen::Index s = 0; s < p.size(); ++s) {
        const double zi = zval(bit_at(static_cast<BasisIndex>(s), i, n));
        const double zj = zval(bit_at(static_cast<BasisIndex>(s), j, n));
        ei += p(s) * zi;
        ej += p(s) * zj;
        eij += p(s) * zi * zj;
    }
    ObservableResult r;
    r.name = "zz_connected";
    r.value = eij - ei * ej;
    r.std_error = 0.0;
    r.n_samples = 0;
    r.method = "exact";
    r.sites = {i, j};
    return r;
}

namespace {

template <typename CorrFn>
ObservableResult average_over_pairs(int n, int s, CorrFn&& corr) {
    if (s < 1 || s > n - 1) throw ArgumentError("avg_correlator: distance out of range");
    ObservableResult r;
    double value = 0.0, var = 0.0;
    std::int64_t n_samples = 0;
    std::string method;
    for (int i = 1; i + s <= n; ++i) {
        ObservableResult one = corr(i, i + s);
        value += one.value;
        var += one.std_error * one.std_error;
        n_samples = one.n_samples;
        method = one.method;
    }
    const double terms = n - s;
    r.name = "gzz_avg";
    r.value = value / terms;
    r.std_error = std::sqrt(var) / terms;
    r.n_samples = n_samples;
    r.method = method;
    r.sites = {s};
    return r;
}

} // namespace

ObservableResult avg_correlator(const Dataset& d, int s) {
    return average_over_pairs(d.meta.n_sites, s,
                              [&](int i, int j) { return diagonal_correlator(d, i, j); });
}

ObservableResult avg_correlator(const RbmParams& rbm, int s) {
    return average_over_pairs(rbm.n_visible(), s,
                              [&](int i, int j) { return diagonal_correlator(rbm, i, j); });
}

ObservableResult local_estimator_expectation(const RbmParams& rbm, const LocalOperator& op,
                                             std::uint64_t seed, const McOptions& mc) {
    const int n = rbm.n_visible();
    if (op.sites.empty() || op.sites.size() > 3)
        throw ArgumentError("local_estimator_expectation: operator must act on 1..3 sites");
    for (int site : op.sites) check_site(site, n);
    const auto k = static_cast<int>(op.sites.size());
    const Eigen::Index local_dim = Eigen::Index{1} << k;
    if (op.matrix.rows() != local_dim || op.matrix.cols() != local_dim)
        throw ArgumentError("local_estimator_expectation: matrix must be 2^k x 2^k");

    Binner binner = run_mc(rbm, seed, mc, 1,
                           [&](const Eigen::Ref<const Eigen::VectorXd>&, BasisIndex idx,
                               Eigen::VectorXd& out) {
        // local bits of sigma at the operator sites, site-list order
        BasisIndex row = 0;
        for (int site : op.sites) row = (row << 1) | static_cast<BasisIndex>(bit_at(idx, site, n));
        double acc = 0.0;
        for (BasisIndex col = 0; col < static_cast<BasisIndex>(local_dim); ++col) {
            const double elem = op.matrix(row, col);
            if (elem == 0.0) continue;
            BasisIndex target = idx;
            for (int b = 0; b < k; ++b) {
                const int want = (col >> (k - 1 - b)) & 1u;
                if (bit_at(target, op.sites[static_cast<std::size_t>(b)], n) != want)
                    target = flip_site(target, op.sites[static_cast<std::size_t>(b)], n);
            }
            acc += elem * (target == idx ? 1.0 : std::exp(half_energy_diff(rbm, idx, target)));
        }
        out(0) = acc;
    });
    return from_binner(binner, 0, "local_op", "monte-carlo", op.sites, seed);
}

std::vector<ObservableResult> transverse_profile(const RbmParams& rbm, std::uint64_t seed,
                                                 const McOptions& mc) {
    const int n = rbm.n_visible();
    Binner binner = run_mc(rbm, seed, mc, n,
                           [&](const Eigen::Ref<const Eigen::VectorXd>&, BasisIndex idx,
                               Eigen::VectorXd& out) {
        for (int i = 1; i <= n; ++i)
            out(i - 1) = std::exp(half_energy_diff(rbm, idx, flip_site(idx, i, n)));
    });
    std::vector<ObservableResult> profile;
    profile.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i)
        profile.push_back(from_binner(binner, i - 1, "x_mean", "monte-carlo", {i}, seed));
    return profile;
}

ObservableResult xx_connected(const RbmParams& rbm, int i, std::uint64_t seed,
                              const McOptions& mc) {
    const int n = rbm.n_visible();
    check_site(i, n);
    check_site(i + 1, n);
    Binner binner = run_mc(rbm, seed, mc, 3,
                           [&](const Eigen::Ref<const Eigen::VectorXd>&, BasisIndex idx,
                               Eigen::VectorXd& out) {
        const BasisIndex fi = flip_site(idx, i, n);
        const BasisIndex fj = flip_site(idx, i + 1, n);
        const BasisIndex fij = flip_site(fi, i + 1, n);
        out(0) = std::exp(half_energy_diff(rbm, idx, fi));
        out(1) = std::exp(half_energy_diff(rbm, idx, fj));
        out(2) = std::exp(half_energy_diff(rbm, idx, fij));
    });
    // covariance-aware error through the delete-one-bin jackknife
    auto [value, se] = binner.jackknife(
        [](const Eigen::VectorXd& m) { return m(2) - m(0) * m(1); });
    ObservableResult r;
    r.name = "xx_connected";
    r.value = value;
    r.std_error = se;
    r.n_samples = binner.n_samples();
    r.method = "monte-carlo";
    r.sites = {i, i + 1};
    r.seed = seed;
    return r;
}

namespace {

std::pair<BasisIndex, BasisIndex> swap_region(BasisIndex a, BasisIndex b, BasisIndex mask) {
    const BasisIndex mixed_a = (b & mask) | (a & ~mask);
    const BasisIndex mixed_b = (a & mask) | (b & ~mask);
    return {mixed_a, mixed_b};
}

BasisIndex region_mask(const std::vector<int>& region, int n) {
    if (region.empty()) throw ArgumentError("renyi2: empty region");
    BasisIndex mask = 0;
    for (int site : region) {
        check_site(site, n);
        mask |= BasisIndex{1} << (n - site);
    }
    return mask;
}

} // namespace

ObservableResult renyi2_swap(const RbmParams& rbm, const std::vector<int>& region,
                             std::uint64_t seed, const McOptions& mc) {
    const int n = rbm.n_visible();
    const BasisIndex mask = region_mask(region, n);
    const McPlan plan = plan_mc(mc);

    // two independently seeded replicas
    GibbsSampler replica_a(rbm, plan.n_chains, split_seed(seed, 0xA));
    GibbsSampler replica_b(rbm, plan.n_chains, split_seed(seed, 0xB));
    replica_a.init_uniform();
    replica_b.init_uniform();
    replica_a.sweep(mc.burn_in);
    replica_b.sweep(mc.burn_in);

    Binner binner(1, plan.bin_size);
    Eigen::VectorXd value(1);
    const int records = plan.bins_per_chain * plan.bin_size;
    std::vector<std::vector<Eigen::VectorXd>> per_chain(static_cast<std::size_t>(plan.n_chains));
    for (int r = 0; r < records; ++r) {
        replica_a.sweep(1);
        replica_b.sweep(1);
        for (int c = 0; c < plan.n_chains; ++c) {
            const BasisIndex sa = column_to_index(replica_a.visible(), c);
            const BasisIndex sb = column_to_index(replica_b.visible(), c);
            const auto [ma, mb] = swap_region(sa, sb, mask);
            const double log_ratio = half_energy_diff(rbm, sa, ma) + half_energy_diff(rbm, sb, mb);
            value(0) = std::exp(log_ratio);
            per_chain[static_cast<std::size_t>(c)].push_back(value);
        }
    }
    for (const auto& chain : per_chain)
        for (const auto& v : chain) binner.add(v);

    const double mean_swap = binner.mean()(0);
    if (mean_swap <= 0.0)
        throw NumericError("renyi2_swap: non-positive swap estimate (internal error)");
    ObservableResult r;
    r.name = "renyi2";
    r.value = -std::log(mean_swap);
    r.std_error = binner.std_error()(0) / mean_swap;
    r.n_samples = binner.n_samples();
    r.method = "monte-carlo";
    r.sites = region;
    r.seed = seed;
    return r;
}

double renyi2_exact(const RbmParams& rbm, const std::vector<int>& region) {
    const int n = rbm.n_visible();
    if (n > 16) throw ResourceError("renyi2_exact: N > 16 exceeds the enumeration cap");
    region_mask(region, n); // validates sites
    const Eigen::VectorXd p = probability_table(rbm);
    QuantumState psi = QuantumState::pure(n, p.cwiseSqrt().cast<std::complex<double>>());
    return renyi_entropy(partial_trace(psi, region), 2);
}

ObservableResult mutual_information_rbm(const RbmParams& rbm, int cut_bond, bool use_mc,
                                        std::uint64_t seed, const McOptions& mc) {
    const int n = rbm.n_visible();
    if (cut_bond < 1 || cut_bond > n - 1)
        throw ArgumentError("mutual_information_rbm: bond out of range");
    std::vector<int> region_a(static_cast<std::size_t>(cut_bond));
    std::iota(region_a.begin(), region_a.end(), 1);
    std::vector<int> region_b(static_cast<std::size_t>(n - cut_bond));
    std::iota(region_b.begin(), region_b.end(), cut_bond + 1);

    ObservableResult r;
    r.name = "mutual_information_2";
    r.sites = {cut_bond};
    r.seed = seed;
    if (use_mc) {
        const ObservableResult sa = renyi2_swap(rbm, region_a, split_seed(seed, 1), mc);
        const ObservableResult sb = renyi2_swap(rbm, region_b, split_seed(seed, 2), mc);
        r.value = sa.value + sb.value;
        r.std_error = std::sqrt(sa.std_error * sa.std_error + sb.std_error * sb.std_error);
        r.n_samples = sa.n_samples + sb.n_samples;
        r.method = "monte-carlo";
    } else {
        r.value = renyi2_exact(rbm, region_a) + renyi2_exact(rbm, region_b);
        r.std_error = 0.0;
        r.n_samples = 0;
        r.method = "exact";
    }
    return r;
}

std::string DiagonalSpec::name() const {
    switch (kind) {
        case Kind::MeanN: return "n_mean";
        case Kind::ZzConnected: return "zz_connected";
        case Kind::GzzAvg: return "gzz_avg";
    }
    return "diagonal";
}

ObservableResult forward_noise(const RbmParams& rbm, const NoiseModel& nm,
                               const DiagonalSpec& obs, std::uint64_t seed, const McOptions& mc) {
    nm.validate();
    const int n = rbm.n_visible();
    int n_est = 1;
    if (obs.kind == DiagonalSpec::Kind::ZzConnected) {
        check_site(obs.i, n);
        check_site(obs.j, n);
        n_est = 3;
    } else if (obs.kind == DiagonalSpec::Kind::GzzAvg) {
        if (obs.i < 1 || obs.i > n - 1) throw ArgumentError("forward_noise: distance out of range");
        n_est = 2 * n; // z_i and z_i z_{i+s} (padded)
    } else {
        check_site(obs.i, n);
    }

    // channel draws use a stream disjoint from the chain streams
    Rng channel_rng(split_seed(seed, 0xC0DE));
    auto corrupt_one = [&](BasisIndex s) {
        BasisIndex tau = s;
        for (int i = 1; i <= n; ++i) {
            const double rate = bit_at(s, i, n) ? nm.p01 : nm.p10;
            if (channel_rng.uniform() < rate) tau = flip_site(tau, i, n);
        }
        return tau;
    };

    Binner binner = run_mc(rbm, seed, mc, n_est,
                           [&](const Eigen::Ref<const Eigen::VectorXd>&, BasisIndex idx,
                               Eigen::VectorXd& out) {
        const BasisIndex tau = nm.is_zero() ? idx : corrupt_one(idx);
        switch (obs.kind) {
            case DiagonalSpec::Kind::MeanN:
                out(0) = bit_at(tau, obs.i, n);
                break;
            case DiagonalSpec::Kind::ZzConnected: {
                const double zi = zval(bit_at(tau, obs.i, n));
                const double zj = zval(bit_at(tau, obs.j, n));
                out(0) = zi;
                out(1) = zj;
                out(2) = zi * zj;
                break;
            }
            case DiagonalSpec::Kind::GzzAvg: {
                for (int i = 1; i <= n; ++i) out(i - 1) = zval(bit_at(tau, i, n));
                for (int i = 1; i <= n; ++i) {
                    const int j = i + obs.i;
                    out(n + i - 1) = j <= n ? out(i - 1) * zval(bit_at(tau, j, n)) : 0.0;
                }
                break;
            }
        }
    });

    ObservableResult r;
    r.name = obs.name() + "_noisy";
    r.n_samples = binner.n_samples();
    r.method = "monte-carlo";
    r.seed = seed;
    switch (obs.kind) {
        case DiagonalSpec::Kind::MeanN:
            r.value = binner.mean()(0);
            r.std_error = binner.std_error()(0);
            r.sites = {obs.i};
            break;
        case DiagonalSpec::Kind::ZzConnected: {
            auto [v, se] = binner.jackknife(
                [](const Eigen::VectorXd& m) { return m(2) - m(0) * m(1); });
            r.value = v;
            r.std_error = se;
            r.sites = {obs.i, obs.j};
            break;
        }
        case DiagonalSpec::Kind::GzzAvg: {
            const int s = obs.i;
            auto stat = [n, s](const Eigen::VectorXd& m) {
                double acc = 0.0;
                for (int i = 1; i + s <= n; ++i)
                    acc += m(n + i - 1) - m(i - 1) * m(i + s - 1);
                return acc / (n - s);
            };
            auto [v, se] = binner.jackknife(stat);
            r.value = v;
            r.std_error = se;
            r.sites = {s};
            break;
        }
    }
    return r;
}

} // namespace rbmtomo
