#include "rbmtomo/hamiltonian.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <iostream>
#include <limits>
#include <vector>

namespace rbmtomo {

void HamiltonianParams::validate() const {
    if (n_sites < 2) throw ArgumentError("HamiltonianParams: n_sites must be >= 2");
    if (v_nn <= 0.0) throw ArgumentError("HamiltonianParams: v_nn must be positive");
    if (interaction_cutoff == 0 || interaction_cutoff < -1)
        throw ArgumentError("HamiltonianParams: interaction_cutoff must be >= 1");
}

Eigen::VectorXd hamiltonian_diagonal(const HamiltonianParams& p) {
    p.validate();
    const int n = p.n_sites;
    const int cut = p.cutoff();
    const Eigen::Index dim = Eigen::Index{1} << n;

    std::vector<double> coupling(static_cast<std::size_t>(n), 0.0);
    for (int d = 1; d <= std::min(cut, n - 1); ++d)
        coupling[static_cast<std::size_t>(d)] = p.v_nn / std::pow(static_cast<double>(d), 6.0);

    Eigen::VectorXd diag(dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
        const auto idx = static_cast<BasisIndex>(s);
        double e = 0.0;
        int n_exc = 0;
        for (int i = 1; i <= n; ++i) {
            if (!bit_at(idx, i, n)) continue;
            ++n_exc;
            for (int j = i + 1; j <= n && j - i <= cut; ++j)
                if (bit_at(idx, j, n)) e += coupling[static_cast<std::size_t>(j - i)];
        }
        diag(s) = e - p.delta * n_exc;
    }
    return diag;
}

Eigen::MatrixXd build_hamiltonian(const HamiltonianParams& p, std::size_t budget_bytes) {
    p.validate();
    if (p.n_sites > 16) throw ResourceError("build_hamiltonian: N > 16 exceeds the size cap");
    const Eigen::Index dim = Eigen::Index{1} << p.n_sites;
    const std::size_t bytes = static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim) * sizeof(double);
    if (bytes > budget_bytes)
        throw ResourceError("build_hamiltonian: dense matrix (" + std::to_string(bytes) +
                            " bytes) exceeds the memory budget; use the matrix-free path");

    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    h.diagonal() = hamiltonian_diagonal(p);
    const double hop = -0.5 * p.omega;
    if (hop != 0.0) {
        for (Eigen::Index s = 0; s < dim; ++s)
            for (int i = 1; i <= p.n_sites; ++i)
                h(s, flip_site(static_cast<BasisIndex>(s), i, p.n_sites)) = hop;
    }
    return h;
}

void apply_hamiltonian(const HamiltonianParams& p, const Eigen::VectorXd& diag,
                       const Eigen::VectorXd& x, Eigen::VectorXd& y) {
    const int n = p.n_sites;
    const Eigen::Index dim = Eigen::Index{1} << n;
    y = diag.cwiseProduct(x);
    const double hop = -0.5 * p.omega;
    if (hop == 0.0) return;
    for (int i = 1; i <= n; ++i) {
        const Eigen::Index m = Eigen::Index{1} << (n - i);
        // sx_i permutes blocks of length m pairwise.
        for (Eigen::Index base = 0; base < dim; base += 2 * m) {
            y.segment(base, m) += hop * x.segment(base + m, m);
            y.segment(base + m, m) += hop * x.segment(base, m);
        }
    }
}

namespace {

void fix_sign(Eigen::VectorXd& v) {
    Eigen::Index dominant = 0;
    v.cwiseAbs().maxCoeff(&dominant);
    if (v(dominant) < 0.0) v = -v;
}

GroundStateResult make_result(int n_sites, Eigen::VectorXd vec, double e0, double gap) {
    GroundStateResult out;
    out.energy = e0;
    out.gap = gap;
    out.degenerate = gap < kDegeneracyGap;
    if (out.degenerate) {
        std::cerr << "[rbmtomo] warning: near-degenerate ground space (gap " << gap
                  << "); tie-broken toward the lexicographically smallest dominant configuration\n";
    }
    fix_sign(vec);
    out.state = QuantumState::pure(n_sites, vec.cast<std::complex<double>>());
    return out;
}

int sites_from_dim(Eigen::Index dim) {
    int n = 0;
    while ((Eigen::Index{1} << n) < dim) ++n;
    if ((Eigen::Index{1} << n) != dim) throw ArgumentError("operator dimension is not a power of 2");
    return n;
}

// Hand-rolled Lanczos with full reorthogonalization; used where the dense
// matrix does not fit memory. Start vector is all-ones plus a deterministic
// ripple, nonorthogonal to the ground state for omega > 0 by positivity.
template <typename ApplyFn>
GroundStateResult lanczos_ground_state(int n_sites, Eigen::Index dim, ApplyFn&& apply,
                                       int max_iter = 500, double tol = 1e-11) {
    Eigen::VectorXd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        v(i) = 1.0 + 1e-3 * (static_cast<double>(mix64(static_cast<std::uint64_t>(i)) >> 11) * 0x1.0p-53 - 0.5);
    v.normalize();

    std::vector<Eigen::VectorXd> basis;
    std::vector<double> alpha, beta;
    Eigen::VectorXd w(dim);

    double e0 = 0.0, e1 = 0.0;
    Eigen::VectorXd ritz_weights;
    for (int it = 0; it < max_iter; ++it) {
        basis.push_back(v);
        apply(v, w);
        const double a = v.dot(w);
        alpha.push_back(a);
        w -= a * v;
        if (!beta.empty()) w -= beta.back() * basis[basis.size() - 2];
        // full reorthogonalization, two classical Gram-Schmidt passes
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) w -= q.dot(w) * q;
        const double b = w.norm();

        const int k = static_cast<int>(alpha.size());
        if (k >= 2) {
            Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
            for (int i = 0; i < k; ++i) {
                tri(i, i) = alpha[static_cast<std::size_t>(i)];
                if (i + 1 < k) {
                    tri(i, i + 1) = beta[static_cast<std::size_t>(i)];
                    tri(i + 1, i) = beta[static_cast<std::size_t>(i)];
                }
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
            e0 = es.eigenvalues()(0);
            e1 = es.eigenvalues()(1);
            ritz_weights = es.eigenvectors().col(0);
            // residual of the lowest Ritz pair: |beta_k| * |last component|
            const double resid = b * std::abs(ritz_weights(k - 1));
            if (resid < tol * std::max(1.0, std::abs(e0)) || b < 1e-14) break;
        }
        if (b < 1e-14) break;
        beta.push_back(b);
        v = w / b;
    }

    if (alpha.size() < 2) {
        // Start vector was already an eigenvector.
        return make_result(n_sites, basis.front(), alpha.front(),
                           std::numeric_limits<double>::infinity());
    }
    Eigen::VectorXd ground = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < basis.size() && i < alpha.size(); ++i)
        ground += ritz_weights(static_cast<Eigen::Index>(i)) * basis[i];
    ground.normalize();
    return make_result(n_sites, std::move(ground), e0, e1 - e0);
}

} // namespace

GroundStateResult ground_state(const Eigen::MatrixXd& H) {
    const Eigen::Index dim = H.rows();
    if (H.cols() != dim) throw ArgumentError("ground_state: matrix must be square");
    const int n_sites = sites_from_dim(dim);
    if ((H - H.transpose()).cwiseAbs().maxCoeff() > 1e-9)
        throw ArgumentError("ground_state: matrix must be symmetric");

    if (dim <= 4096) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
        const Eigen::VectorXd& ev = es.eigenvalues();
        const double e0 = ev(0);
        const double gap = ev(1) - e0;
        if (gap < kDegeneracyGap) {
            // Deterministic tie-break: rotate within the degenerate space
            // toward the lexicographically smallest dominant configuration.
            Eigen::Index last = 0;
            while (last + 1 < dim && ev(last + 1) - e0 < kDegeneracyGap) ++last;
            Eigen::Index best_cfg = dim;
            Eigen::Index best_col = 0;
            for (Eigen::Index c = 0; c <= last; ++c) {
                Eigen::Index dominant = 0;
                es.eigenvectors().col(c).cwiseAbs().maxCoeff(&dominant);
                if (dominant < best_cfg) {
                    best_cfg = dominant;
                    best_col = c;
                }
            }
            return make_result(n_sites, es.eigenvectors().col(best_col), e0, gap);
        }
        return make_result(n_sites, es.eigenvectors().col(0), e0, gap);
    }
    return lanczos_ground_state(n_sites, dim, [&H](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
        y.noalias() = H * x;
    });
}

GroundStateResult ground_state(const HamiltonianParams& p, Eigen::Index dense_dim_limit) {
    p.validate();
    const Eigen::Index dim = Eigen::Index{1} << p.n_sites;
    if (dim <= dense_dim_limit) return ground_state(build_hamiltonian(p));

    const Eigen::VectorXd diag = hamiltonian_diagonal(p);
    if (p.omega == 0.0) {
        // Diagonal Hamiltonian: pick the smallest entry, lexicographic ties.
        Eigen::Index arg = 0;
        double e0 = diag(0);
        for (Eigen::Index s = 1; s < dim; ++s)
            if (diag(s) < e0 - 1e-15) {
                e0 = diag(s);
                arg = s;
            }
        double gap = std::numeric_limits<double>::infinity();
        for (Eigen::Index s = 0; s < dim; ++s)
            if (s != arg) gap = std::min(gap, diag(s) - e0);
        Eigen::VectorXd vec = Eigen::VectorXd::Zero(dim);
        vec(arg) = 1.0;
        return make_result(p.n_sites, std::move(vec), e0, gap);
    }
    return lanczos_ground_state(p.n_sites, dim,
                                [&p, &diag](const Eigen::VectorXd& x, Eigen::VectorXd& y) {
                                    apply_hamiltonian(p, diag, x, y);
                                });
}

QuantumState approx_z2_state() {
    const int n = 8;
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(256);
    amps(string_to_index("10100101")) = 1.0 / std::sqrt(2.0); // r g r g g r g r
    amps(string_to_index("10010101")) = 0.5;                  // r g g r g r g r
    amps(string_to_index("10101001")) = 0.5;                  // r g r g r g g r
    return QuantumState::pure(n, std::move(amps));
}

Eigen::Matrix3d effective_blockade_hamiltonian(double omega, double delta) {
    if (delta == 0.0) throw NumericError("effective_blockade_hamiltonian: delta must be nonzero");
    Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
    const double coupling = -omega * omega / (4.0 * delta);
    h(0, 1) = h(1, 0) = coupling;
    h(0, 2) = h(2, 0) = coupling;
    if (omega == 0.0)
        std::cerr << "[rbmtomo] warning: effective blockade Hamiltonian is zero (triple degeneracy)\n";
    return h;
}

} // namespace rbmtomo
