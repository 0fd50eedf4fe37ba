#ifndef RBMTOMO_TEST_HELPERS_HPP
#define RBMTOMO_TEST_HELPERS_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <complex>
#include <random>
#include <vector>

#include "rbmtomo/common.hpp"
#include "rbmtomo/hamiltonian.hpp"
#include "rbmtomo/rbm.hpp"
#include "rbmtomo/state.hpp"

// Independent oracles used by the tests. These deliberately avoid the
// library's own code paths: Hamiltonians come from explicit Kronecker
// products, evolutions from eigendecompositions, RBM quantities from direct
// summation over the joint (sigma, h) space.
namespace oracle {

inline Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Eigen::MatrixXd site_operator(int n_sites, int site, const Eigen::MatrixXd& op) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Identity(1, 1);
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
    for (int i = 1; i <= n_sites; ++i) out = kron(out, i == site ? op : eye);
    return out;
}

// Eq-by-eq Kronecker-product construction of the Rydberg Hamiltonian.
inline Eigen::MatrixXd rydberg_hamiltonian(const rbmtomo::HamiltonianParams& p) {
    const Eigen::Index dim = Eigen::Index{1} << p.n_sites;
    Eigen::Matrix2d n_op;
    n_op << 0, 0, 0, 1; // |1> is the excited state, basis order (0, 1)
    Eigen::Matrix2d sx;
    sx << 0, 1, 1, 0;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 1; i <= p.n_sites; ++i) {
        h -= p.delta * site_operator(p.n_sites, i, n_op);
        h -= 0.5 * p.omega * site_operator(p.n_sites, i, sx);
    }
    for (int i = 1; i <= p.n_sites; ++i)
        for (int j = i + 1; j <= p.n_sites; ++j)
            if (j - i <= p.cutoff())
                h += p.v_nn / std::pow(j - i, 6.0) *
                     (site_operator(p.n_sites, i, n_op) * site_operator(p.n_sites, j, n_op));
    return h;
}

// exp(-i H t) rho exp(+i H t) for a constant Hamiltonian, via eigenvectors.
inline Eigen::MatrixXcd unitary_evolve(const Eigen::MatrixXd& h_rad, double t,
                                       const Eigen::MatrixXcd& rho) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h_rad);
    Eigen::VectorXcd phases(es.eigenvalues().size());
    for (Eigen::Index k = 0; k < phases.size(); ++k)
        phases(k) = std::exp(std::complex<double>(0.0, -es.eigenvalues()(k) * t));
    Eigen::MatrixXcd u =
        es.eigenvectors().cast<std::complex<double>>() * phases.asDiagonal() *
        es.eigenvectors().transpose().cast<std::complex<double>>();
    return u * rho * u.adjoint();
}

// E_eff by naive long-double summation.
inline double effective_energy_naive(const rbmtomo::RbmParams& rbm, rbmtomo::BasisIndex sigma) {
    const int n = rbm.n_visible();
    long double e = 0.0L;
    for (int i = 1; i <= n; ++i)
        if (rbmtomo::bit_at(sigma, i, n)) e += static_cast<long double>(rbm.visible_bias(i - 1));
    for (int j = 0; j < rbm.n_hidden(); ++j) {
        long double act = rbm.hidden_bias(j);
        for (int i = 1; i <= n; ++i)
            if (rbmtomo::bit_at(sigma, i, n)) act += static_cast<long double>(rbm.weights(j, i - 1));
        e += std::log1p(std::exp(act));
    }
    return static_cast<double>(e);
}

// Unnormalized joint weight exp(h^T W sigma + b.sigma + c.h).
inline double joint_weight(const rbmtomo::RbmParams& rbm, rbmtomo::BasisIndex sigma,
                           rbmtomo::BasisIndex h) {
    const int n = rbm.n_visible();
    const int nh = rbm.n_hidden();
    double e = 0.0;
    for (int i = 1; i <= n; ++i)
        if (rbmtomo::bit_at(sigma, i, n)) e += rbm.visible_bias(i - 1);
    for (int j = 1; j <= nh; ++j) {
        if (!rbmtomo::bit_at(h, j, nh)) continue;
        e += rbm.hidden_bias(j - 1);
        for (int i = 1; i <= n; ++i)
            if (rbmtomo::bit_at(sigma, i, n)) e += rbm.weights(j - 1, i - 1);
    }
    return std::exp(e);
}

// p(sigma) by brute-force summation over the hidden layer.
inline Eigen::VectorXd rbm_distribution_bruteforce(const rbmtomo::RbmParams& rbm) {
    const Eigen::Index dim = Eigen::Index{1} << rbm.n_visible();
    const Eigen::Index hdim = Eigen::Index{1} << rbm.n_hidden();
    Eigen::VectorXd p = Eigen::VectorXd::Zero(dim);
    for (Eigen::Index s = 0; s < dim; ++s)
        for (Eigen::Index h = 0; h < hdim; ++h)
            p(s) += joint_weight(rbm, static_cast<rbmtomo::BasisIndex>(s),
                                 static_cast<rbmtomo::BasisIndex>(h));
    return p / p.sum();
}

inline rbmtomo::RbmParams random_rbm(int n, int nh, unsigned seed, double scale = 0.7) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> dist(0.0, scale);
    rbmtomo::RbmParams rbm;
    rbm.weights.resize(nh, n);
    rbm.visible_bias.resize(n);
    rbm.hidden_bias.resize(nh);
    for (int j = 0; j < nh; ++j)
        for (int i = 0; i < n; ++i) rbm.weights(j, i) = dist(gen);
    for (int i = 0; i < n; ++i) rbm.visible_bias(i) = dist(gen);
    for (int j = 0; j < nh; ++j) rbm.hidden_bias(j) = dist(gen);
    return rbm;
}

inline rbmtomo::QuantumState random_mixed_state(int n_sites, unsigned seed, int rank = 0) {
    const Eigen::Index dim = Eigen::Index{1} << n_sites;
    if (rank <= 0) rank = static_cast<int>(dim);
    std::mt19937 gen(seed);
    std::normal_distribution<double> dist;
    Eigen::MatrixXcd g(dim, rank);
    for (Eigen::Index r = 0; r < dim; ++r)
        for (int c = 0; c < rank; ++c) g(r, c) = std::complex<double>(dist(gen), dist(gen));
    Eigen::MatrixXcd rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = 0.5 * (rho + rho.adjoint().eval());
    return rbmtomo::QuantumState::mixed(n_sites, std::move(rho));
}

inline rbmtomo::QuantumState random_pure_state(int n_sites, unsigned seed) {
    const Eigen::Index dim = Eigen::Index{1} << n_sites;
    std::mt19937 gen(seed);
    std::normal_distribution<double> dist;
    Eigen::VectorXcd v(dim);
    for (Eigen::Index r = 0; r < dim; ++r) v(r) = std::complex<double>(dist(gen), dist(gen));
    v.normalize();
    return rbmtomo::QuantumState::pure(n_sites, std::move(v));
}

inline double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
    return 0.5 * (p - q).cwiseAbs().sum();
}

} // namespace oracle

#endif
