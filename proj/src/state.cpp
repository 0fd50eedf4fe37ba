#include "rbmtomo/state.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace rbmtomo {

QuantumState QuantumState::pure(int n_sites, Eigen::VectorXcd amplitudes) {
    if (n_sites < 1) throw ArgumentError("QuantumState: n_sites must be >= 1");
    if (amplitudes.size() != (Eigen::Index{1} << n_sites))
        throw ArgumentError("QuantumState: amplitude vector must have length 2^N");
    QuantumState s;
    s.n_sites_ = n_sites;
    s.pure_ = true;
    s.vec_ = std::move(amplitudes);
    return s;
}

QuantumState QuantumState::mixed(int n_sites, Eigen::MatrixXcd density) {
    if (n_sites < 1) throw ArgumentError("QuantumState: n_sites must be >= 1");
    const Eigen::Index dim = Eigen::Index{1} << n_sites;
    if (density.rows() != dim || density.cols() != dim)
        throw ArgumentError("QuantumState: density matrix must be 2^N x 2^N");
    QuantumState s;
    s.n_sites_ = n_sites;
    s.pure_ = false;
    s.rho_ = std::move(density);
    return s;
}

const Eigen::VectorXcd& QuantumState::amplitudes() const {
    if (!pure_) throw ArgumentError("QuantumState: amplitudes() on a mixed state");
    return vec_;
}

const Eigen::MatrixXcd& QuantumState::density() const {
    if (pure_) throw ArgumentError("QuantumState: density() on a pure state");
    return rho_;
}

Eigen::MatrixXcd QuantumState::density_matrix() const {
    if (pure_) return vec_ * vec_.adjoint();
    return rho_;
}

Eigen::VectorXd QuantumState::probabilities() const {
    Eigen::VectorXd p;
    if (pure_) {
        p = vec_.cwiseAbs2();
    } else {
        p = rho_.diagonal().real().cwiseMax(0.0);
    }
    const double total = p.sum();
    if (total <= 0.0) throw NumericError("QuantumState: zero-mass measurement distribution");
    return p / total;
}

double QuantumState::purity() const {
    if (pure_) return 1.0;
    return (rho_ * rho_).trace().real();
}

void QuantumState::validate(double tol, double eig_tol) const {
    if (pure_) {
        const double norm = vec_.norm();
        if (std::abs(norm - 1.0) > tol)
            throw NumericError("pure state norm deviates from 1 by " +
                               std::to_string(std::abs(norm - 1.0)));
        return;
    }
    const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol) throw NumericError("density matrix not Hermitian, max dev " + std::to_string(herm));
    const double tr_dev = std::abs(rho_.trace().real() - 1.0) + std::abs(rho_.trace().imag());
    if (tr_dev > tol) throw NumericError("density matrix trace deviates by " + std::to_string(tr_dev));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho_, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -eig_tol)
        throw NumericError("density matrix has eigenvalue " + std::to_string(min_eig));
}

namespace {

std::vector<int> normalize_subset(int n_sites, const std::vector<int>& keep) {
    if (keep.empty()) throw ArgumentError("partial_trace: empty site subset");
    std::vector<int> sorted = keep;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.size() != keep.size()) throw ArgumentError("partial_trace: duplicate sites");
    if (sorted.front() < 1 || sorted.back() > n_sites)
        throw ArgumentError("partial_trace: site out of range");
    return sorted;
}

// Index helpers: split a full basis index into (kept, traced) sub-indices.
struct SubsetSplitter {
    int n;
    std::vector<int> keep;   // 1-based
    std::vector<int> traced; // 1-based
    SubsetSplitter(int n_sites, const std::vector<int>& kept) : n(n_sites), keep(kept) {
        std::vector<bool> is_kept(static_cast<std::size_t>(n) + 1, false);
        for (int site : keep) is_kept[static_cast<std::size_t>(site)] = true;
        for (int site = 1; site <= n; ++site)
            if (!is_kept[static_cast<std::size_t>(site)]) traced.push_back(site);
    }
    BasisIndex fuse(BasisIndex a, BasisIndex b) const {
        BasisIndex s = 0;
        for (std::size_t k = 0; k < keep.size(); ++k)
            if ((a >> (keep.size() - 1 - k)) & 1u) s |= BasisIndex{1} << (n - keep[k]);
        for (std::size_t k = 0; k < traced.size(); ++k)
            if ((b >> (traced.size() - 1 - k)) & 1u) s |= BasisIndex{1} << (n - traced[k]);
        return s;
    }
};

} // namespace

QuantumState partial_trace(const QuantumState& state, const std::vector<int>& keep) {
    const int n = state.n_sites();
    const std::vector<int> kept = normalize_subset(n, keep);
    const int nk = static_cast<int>(kept.size());
    const int nt = n - nk;
    const Eigen::Index dim_a = Eigen::Index{1} << nk;
    const Eigen::Index dim_b = Eigen::Index{1} << nt;
    SubsetSplitter split(n, kept);

    Eigen::MatrixXcd reduced = Eigen::MatrixXcd::Zero(dim_a, dim_a);
    if (state.is_pure()) {
        const Eigen::VectorXcd& psi = state.amplitudes();
        // rho_A[a,a'] = sum_b psi(a,b) conj(psi(a',b))
        Eigen::MatrixXcd block(dim_a, dim_b);
        for (Eigen::Index a = 0; a < dim_a; ++a)
            for (Eigen::Index b = 0; b < dim_b; ++b)
                block(a, b) = psi(split.fuse(static_cast<BasisIndex>(a), static_cast<BasisIndex>(b)));
        reduced = block * block.adjoint();
    } else {
        const Eigen::MatrixXcd& rho = state.density();
        for (Eigen::Index a = 0; a < dim_a; ++a)
            for (Eigen::Index a2 = 0; a2 < dim_a; ++a2) {
                std::complex<double> acc = 0.0;
                for (Eigen::Index b = 0; b < dim_b; ++b)
                    acc += rho(split.fuse(static_cast<BasisIndex>(a), static_cast<BasisIndex>(b)),
                               split.fuse(static_cast<BasisIndex>(a2), static_cast<BasisIndex>(b)));
                reduced(a, a2) = acc;
            }
    }
    return QuantumState::mixed(nk, std::move(reduced));
}

namespace {

Eigen::VectorXd spectrum(const QuantumState& state) {
    if (state.is_pure()) {
        Eigen::VectorXd v(1);
        v(0) = state.amplitudes().squaredNorm();
        return v;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(state.density(), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

} // namespace

double renyi_entropy(const QuantumState& state, int n) {
    if (n < 2) throw ArgumentError("renyi_entropy: order must be >= 2");
    const Eigen::VectorXd eig = spectrum(state);
    double trace_n = 0.0;
    for (Eigen::Index k = 0; k < eig.size(); ++k) {
        const double lam = std::max(eig(k), 0.0);
        trace_n += std::pow(lam, n);
    }
    if (trace_n <= 0.0) throw NumericError("renyi_entropy: non-positive Tr rho^n");
    return std::log(trace_n) / (1.0 - n);
}

double mutual_information_exact(const QuantumState& state, int cut_bond, int n) {
    const int N = state.n_sites();
    if (cut_bond < 1 || cut_bond > N - 1)
        throw ArgumentError("mutual_information_exact: bond out of range");
    std::vector<int> a(static_cast<std::size_t>(cut_bond));
    std::iota(a.begin(), a.end(), 1);
    std::vector<int> b(static_cast<std::size_t>(N - cut_bond));
    std::iota(b.begin(), b.end(), cut_bond + 1);
    return renyi_entropy(partial_trace(state, a), n) + renyi_entropy(partial_trace(state, b), n) -
           renyi_entropy(state, n);
}

namespace {

// Tr sqrt(M) for Hermitian positive semidefinite M. Eigenvalues at round-off
// scale are dropped: sqrt amplifies them to ~1e-8 each, which would swamp the
// result for low-rank M.
double trace_sqrt(const Eigen::MatrixXcd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    const double cutoff =
        std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300) * 1e-13;
    double acc = 0.0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
        if (es.eigenvalues()(k) > cutoff) acc += std::sqrt(es.eigenvalues()(k));
    return acc;
}

} // namespace

double fidelity(const QuantumState& a, const QuantumState& b) {
    if (a.n_sites() != b.n_sites()) throw ArgumentError("fidelity: dimension mismatch");
    if (a.is_pure() && b.is_pure())
        return std::min(1.0, std::abs(a.amplitudes().dot(b.amplitudes())));
    if (a.is_pure() || b.is_pure()) {
        const QuantumState& p = a.is_pure() ? a : b;
        const QuantumState& m = a.is_pure() ? b : a;
        const std::complex<double> q = p.amplitudes().dot(m.density() * p.amplitudes());
        return std::min(1.0, std::sqrt(std::max(q.real(), 0.0)));
    }
    // Uhlmann via sqrt(rho) from the eigendecomposition.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a.density());
    const double cutoff =
        std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300) * 1e-13;
    Eigen::VectorXd lam = es.eigenvalues();
    for (Eigen::Index k = 0; k < lam.size(); ++k) lam(k) = lam(k) > cutoff ? lam(k) : 0.0;
    Eigen::MatrixXcd sqrt_rho =
        es.eigenvectors() * lam.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
    return std::min(1.0, trace_sqrt(sqrt_rho * b.density() * sqrt_rho));
}

double subsystem_avg_fidelity(const QuantumState& a, const QuantumState& b, int s) {
    const int N = a.n_sites();
    if (b.n_sites() != N) throw ArgumentError("subsystem_avg_fidelity: dimension mismatch");
    if (s < 1 || s > N) throw ArgumentError("subsystem_avg_fidelity: window size out of range");
    double acc = 0.0;
    const int n_windows = N - s + 1;
    for (int i = 1; i <= n_windows; ++i) {
        std::vector<int> window(static_cast<std::size_t>(s));
        std::iota(window.begin(), window.end(), i);
        acc += fidelity(partial_trace(a, window), partial_trace(b, window));
    }
    return acc / n_windows;
}

QuantumState positive_pure_partner(const QuantumState& state) {
    Eigen::VectorXd p = state.probabilities();
    Eigen::VectorXcd amps = p.cwiseSqrt().cast<std::complex<double>>();
    return QuantumState::pure(state.n_sites(), std::move(amps));
}

Dataset sample_measurements(const QuantumState& state, std::int64_t n_samples, std::uint64_t seed,
                            const std::string& source) {
    if (n_samples < 1) throw ArgumentError("sample_measurements: need n_samples >= 1");
    const Eigen::VectorXd p = state.probabilities();
    Eigen::VectorXd cdf(p.size());
    double run = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        run += p(i);
        cdf(i) = run;
    }
    cdf(p.size() - 1) = 1.0;

    Rng rng(seed);
    std::vector<BasisIndex> samples(static_cast<std::size_t>(n_samples));
    for (std::int64_t k = 0; k < n_samples; ++k) {
        const double u = rng.uniform();
        const double* it = std::upper_bound(cdf.data(), cdf.data() + cdf.size(), u);
        samples[static_cast<std::size_t>(k)] =
            static_cast<BasisIndex>(std::min<Eigen::Index>(it - cdf.data(), cdf.size() - 1));
    }

    DatasetMeta meta;
    meta.n_sites = state.n_sites();
    meta.seed = seed;
    meta.source = source;
    return make_dataset(state.n_sites(), std::move(samples), std::move(meta));
}

} // namespace rbmtomo
