#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "helpers.hpp"
#include "rbmtomo/hamiltonian.hpp"
#include "rbmtomo/state.hpp"

using namespace rbmtomo;

TEST_CASE("hamiltonian: N=2 interaction-only is diagonal (0,0,0,30)") {
    const Eigen::MatrixXd h = build_hamiltonian({2, 30.0, 0.0, 0.0, -1});
    CHECK(h(0, 0) == doctest::Approx(0.0));
    CHECK(h(1, 1) == doctest::Approx(0.0));
    CHECK(h(2, 2) == doctest::Approx(0.0));
    CHECK(h(3, 3) == doctest::Approx(30.0));
    CHECK(h.cwiseAbs().sum() == doctest::Approx(30.0));
}

TEST_CASE("hamiltonian: off-diagonals are -omega/2 between single-flip pairs") {
    const HamiltonianParams p{8, 30.0, 2.0, 10.0, -1};
    const Eigen::MatrixXd h = build_hamiltonian(p);
    for (Eigen::Index s = 0; s < h.rows(); ++s) {
        for (int i = 1; i <= 8; ++i) {
            CHECK(h(s, flip_site(static_cast<BasisIndex>(s), i, 8)) == doctest::Approx(-1.0));
        }
    }
    // any pair differing in more than one bit is uncoupled
    CHECK(h(0, 3) == 0.0);
    CHECK(h(5, 10) == 0.0);
}

TEST_CASE("hamiltonian: matches the Kronecker-product oracle at N=3") {
    const HamiltonianParams p{3, 17.0, 1.3, -2.1, 2};
    const Eigen::MatrixXd h = build_hamiltonian(p);
    const Eigen::MatrixXd ref = oracle::rydberg_hamiltonian(p);
    CHECK((h - ref).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("hamiltonian: symmetric for random parameters") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> u(0.1, 20.0);
    for (int trial = 0; trial < 8; ++trial) {
        const HamiltonianParams p{2 + static_cast<int>(gen() % 5), u(gen), u(gen),
                                  u(gen) - 10.0, -1};
        const Eigen::MatrixXd h = build_hamiltonian(p);
        CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("hamiltonian: dense cap honored") {
    CHECK_THROWS_AS(build_hamiltonian({17, 30.0, 2.0, 0.0, -1}), ResourceError);
    CHECK_THROWS_AS(build_hamiltonian({12, 30.0, 2.0, 0.0, -1}, /*budget=*/1024), ResourceError);
}

TEST_CASE("ground_state: classical limit picks |gg>") {
    const GroundStateResult gs = ground_state(build_hamiltonian({2, 30.0, 0.0, -1.0, -1}));
    CHECK(std::abs(gs.state.amplitudes()(0)) == doctest::Approx(1.0));
    CHECK(gs.energy == doctest::Approx(0.0));
    CHECK(!gs.degenerate);
}

TEST_CASE("ground_state: eigenpair residual") {
    const HamiltonianParams p{6, 30.0, 2.0, 3.0, -1};
    const Eigen::MatrixXd h = build_hamiltonian(p);
    const GroundStateResult gs = ground_state(h);
    const Eigen::VectorXd v = gs.state.amplitudes().real();
    const double resid = (h * v - gs.energy * v).norm() / std::abs(gs.energy);
    CHECK(resid < 1e-8);
}

TEST_CASE("ground_state: overlap with the three-configuration state at end-of-sweep params") {
    // Dense-eigensolve oracle values. At omega = 2 the perturbative
    // three-state superposition carries ~91% of the ground state; it becomes
    // exact as omega -> 0.
    const GroundStateResult gs = ground_state(build_hamiltonian({8, 30.0, 2.0, 10.0, 2}));
    const QuantumState z2 = approx_z2_state();
    const double overlap = fidelity(gs.state, z2);
    CHECK(overlap * overlap == doctest::Approx(0.91166).epsilon(0.005));

    const GroundStateResult gs_small = ground_state(build_hamiltonian({8, 30.0, 0.5, 10.0, 2}));
    const double overlap_small = fidelity(gs_small.state, z2);
    CHECK(overlap_small * overlap_small > 0.99);
}

TEST_CASE("ground_state: nonnegative amplitudes for omega > 0") {
    std::mt19937 gen(21);
    std::uniform_real_distribution<double> u(0.2, 15.0);
    for (int trial = 0; trial < 6; ++trial) {
        const int n = 2 + static_cast<int>(gen() % 9); // up to N=10
        const HamiltonianParams p{n, u(gen) + 5.0, u(gen), u(gen) - 7.0, -1};
        const GroundStateResult gs = ground_state(p);
        CHECK(gs.state.amplitudes().real().minCoeff() > -1e-9);
    }
}

TEST_CASE("ground_state: matrix-free path agrees with the dense solver") {
    const HamiltonianParams p{10, 30.0, 2.0, 1.0, -1};
    const GroundStateResult dense = ground_state(build_hamiltonian(p));
    const GroundStateResult lanczos = ground_state(p, /*dense_dim_limit=*/2);
    CHECK(lanczos.energy == doctest::Approx(dense.energy).epsilon(1e-10));
    CHECK(fidelity(lanczos.state, dense.state) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(lanczos.gap == doctest::Approx(dense.gap).epsilon(1e-3));
}

TEST_CASE("ground_state: degenerate classical blockade manifold is flagged") {
    const GroundStateResult gs = ground_state(HamiltonianParams{8, 30.0, 0.0, 10.0, 2},
                                              /*dense_dim_limit=*/2);
    CHECK(gs.degenerate);
    // lexicographically smallest of the three degenerate configurations
    Eigen::Index arg = 0;
    gs.state.amplitudes().cwiseAbs().maxCoeff(&arg);
    CHECK(arg == static_cast<Eigen::Index>(string_to_index("10010101")));
}

TEST_CASE("approx_z2_state: amplitudes and norm") {
    const QuantumState z2 = approx_z2_state();
    const Eigen::VectorXd p = z2.probabilities();
    CHECK(p(string_to_index("10100101")) == doctest::Approx(0.5));
    CHECK(p(string_to_index("10010101")) == doctest::Approx(0.25));
    CHECK(p(string_to_index("10101001")) == doctest::Approx(0.25));
    CHECK(p.sum() == doctest::Approx(1.0));
    CHECK(z2.amplitudes().norm() == doctest::Approx(1.0));
}

TEST_CASE("effective_blockade_hamiltonian: coupling and ground vector") {
    const Eigen::Matrix3d h = effective_blockade_hamiltonian(2.0, 10.0);
    CHECK(h(0, 1) == doctest::Approx(-0.1));
    CHECK(h(0, 2) == doctest::Approx(-0.1));
    CHECK(h(1, 2) == 0.0);
    CHECK(h.diagonal().cwiseAbs().maxCoeff() == 0.0);

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(h);
    Eigen::Vector3d gs = es.eigenvectors().col(0);
    if (gs(0) < 0) gs = -gs;
    CHECK(gs(0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(gs(1) == doctest::Approx(0.5));
    CHECK(gs(2) == doctest::Approx(0.5));

    CHECK(effective_blockade_hamiltonian(0.0, 5.0).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS_AS(effective_blockade_hamiltonian(2.0, 0.0), NumericError);
}

TEST_CASE("partial_trace: product, Bell-like and three-configuration states") {
    // |g> (x) |r>
    Eigen::VectorXcd prod = Eigen::VectorXcd::Zero(4);
    prod(1) = 1.0;
    const QuantumState reduced = partial_trace(QuantumState::pure(2, prod), {1});
    CHECK(std::abs(reduced.density()(0, 0) - 1.0) < 1e-12);
    CHECK(std::abs(reduced.density()(1, 1)) < 1e-12);

    Eigen::VectorXcd bell = Eigen::VectorXcd::Zero(4);
    bell(0) = bell(3) = 1.0 / std::sqrt(2.0);
    const QuantumState half = partial_trace(QuantumState::pure(2, bell), {1});
    CHECK(std::abs(half.density()(0, 0) - 0.5) < 1e-12);
    CHECK(std::abs(half.density()(1, 1) - 0.5) < 1e-12);
    CHECK(std::abs(half.density()(0, 1)) < 1e-12);

    const QuantumState z2a = partial_trace(approx_z2_state(), {1, 2, 3});
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(z2a.density());
    Eigen::VectorXd eig = es.eigenvalues();
    std::sort(eig.data(), eig.data() + eig.size());
    CHECK(eig(eig.size() - 1) == doctest::Approx(0.75));
    CHECK(eig(eig.size() - 2) == doctest::Approx(0.25));
    CHECK(eig.head(eig.size() - 2).cwiseAbs().maxCoeff() < 1e-12);

    CHECK_THROWS_AS(partial_trace(approx_z2_state(), {}), ArgumentError);
    CHECK_THROWS_AS(partial_trace(approx_z2_state(), {0}), ArgumentError);
    CHECK_THROWS_AS(partial_trace(approx_z2_state(), {9}), ArgumentError);
}

TEST_CASE("renyi_entropy: pure, maximally mixed and (3/4, 1/4) spectra") {
    CHECK(renyi_entropy(oracle::random_pure_state(3, 5), 2) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(renyi_entropy(QuantumState::mixed(1, 0.5 * Eigen::MatrixXcd::Identity(2, 2)), 2) ==
          doctest::Approx(std::log(2.0)));
    // direct evaluation: -log(9/16 + 1/16)
    const QuantumState z2a = partial_trace(approx_z2_state(), {1, 2, 3});
    CHECK(renyi_entropy(z2a, 2) == doctest::Approx(-std::log(0.625)).epsilon(1e-10));
    CHECK(-std::log(0.625) == doctest::Approx(0.4700).epsilon(1e-4));
    CHECK_THROWS_AS(renyi_entropy(z2a, 1), ArgumentError);
}

TEST_CASE("mutual_information_exact: product state, three-configuration state") {
    Eigen::VectorXcd prod = Eigen::VectorXcd::Zero(8);
    prod(3) = 1.0;
    for (int s = 1; s <= 2; ++s)
        CHECK(mutual_information_exact(QuantumState::pure(3, prod), s, 2) ==
              doctest::Approx(0.0).epsilon(1e-10));

    CHECK(mutual_information_exact(approx_z2_state(), 3, 2) ==
          doctest::Approx(2.0 * -std::log(0.625)).epsilon(1e-9));
    CHECK(mutual_information_exact(approx_z2_state(), 1, 2) ==
          doctest::Approx(0.0).epsilon(1e-9));
    CHECK_THROWS_AS(mutual_information_exact(approx_z2_state(), 0, 2), ArgumentError);
    CHECK_THROWS_AS(mutual_information_exact(approx_z2_state(), 8, 2), ArgumentError);
}

TEST_CASE("fidelity: identity, orthogonality, pure-mixed cross-check, symmetry") {
    const QuantumState a = oracle::random_pure_state(3, 11);
    CHECK(fidelity(a, a) == doctest::Approx(1.0));

    Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(4), e1 = Eigen::VectorXcd::Zero(4);
    e0(0) = 1.0;
    e1(1) = 1.0;
    CHECK(fidelity(QuantumState::pure(2, e0), QuantumState::pure(2, e1)) ==
          doctest::Approx(0.0));

    // pure-vs-mixed: direct formula against the full Uhlmann route
    const QuantumState rho = oracle::random_mixed_state(3, 17);
    const double direct = fidelity(a, rho);
    const QuantumState a_as_mixed = QuantumState::mixed(3, a.density_matrix());
    const double uhlmann = fidelity(a_as_mixed, rho);
    CHECK(direct == doctest::Approx(uhlmann).epsilon(1e-9));

    const QuantumState b = oracle::random_mixed_state(3, 19);
    CHECK(fidelity(rho, b) == doctest::Approx(fidelity(b, rho)).epsilon(1e-9));
    CHECK(fidelity(rho, rho) == doctest::Approx(1.0).epsilon(1e-9));

    CHECK_THROWS_AS(fidelity(a, oracle::random_pure_state(2, 3)), ArgumentError);
}

TEST_CASE("subsystem_avg_fidelity: identity and single-window limits") {
    const QuantumState rho = oracle::random_mixed_state(3, 23);
    CHECK(subsystem_avg_fidelity(rho, rho, 2) == doctest::Approx(1.0).epsilon(1e-9));

    const QuantumState sigma = oracle::random_mixed_state(3, 29);
    CHECK(subsystem_avg_fidelity(rho, sigma, 3) ==
          doctest::Approx(fidelity(rho, sigma)).epsilon(1e-9));
    CHECK_THROWS_AS(subsystem_avg_fidelity(rho, sigma, 0), ArgumentError);
    CHECK_THROWS_AS(subsystem_avg_fidelity(rho, sigma, 4), ArgumentError);
}

TEST_CASE("positive_pure_partner: idempotence, maximally mixed qubit, entropy bound") {
    const QuantumState z2 = approx_z2_state();
    const QuantumState partner = positive_pure_partner(z2);
    CHECK((partner.amplitudes() - z2.amplitudes()).cwiseAbs().maxCoeff() < 1e-12);

    const QuantumState mm = QuantumState::mixed(1, 0.5 * Eigen::MatrixXcd::Identity(2, 2));
    const QuantumState plus = positive_pure_partner(mm);
    CHECK(std::abs(plus.amplitudes()(0) - 1.0 / std::sqrt(2.0)) < 1e-12);
    CHECK(std::abs(plus.amplitudes()(1) - 1.0 / std::sqrt(2.0)) < 1e-12);

    const QuantumState rho = oracle::random_mixed_state(2, 31);
    CHECK(renyi_entropy(partial_trace(positive_pure_partner(rho), {1}), 2) <=
          renyi_entropy(partial_trace(rho, {1}), 2) + 1e-9);
}

TEST_CASE("positive_pure_partner: Renyi bound on 200 random mixed states") {
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2 + trial % 3; // N in {2,3,4}
        const QuantumState rho = oracle::random_mixed_state(n, 1000 + trial);
        const QuantumState partner = positive_pure_partner(rho);
        for (int s = 1; s <= n - 1; ++s) {
            std::vector<int> region(static_cast<std::size_t>(s));
            std::iota(region.begin(), region.end(), 1);
            for (int order : {2, 3}) {
                CHECK(renyi_entropy(partial_trace(partner, region), order) <=
                      renyi_entropy(partial_trace(rho, region), order) + 1e-9);
                ++checked;
            }
        }
    }
    CHECK(checked >= 200);
}

TEST_CASE("Schmidt symmetry: complementary reductions of pure states") {
    for (int trial = 0; trial < 5; ++trial) {
        const int n = 4;
        const QuantumState psi = oracle::random_pure_state(n, 300 + trial);
        for (int s = 1; s <= n - 1; ++s) {
            std::vector<int> a(static_cast<std::size_t>(s));
            std::iota(a.begin(), a.end(), 1);
            std::vector<int> b(static_cast<std::size_t>(n - s));
            std::iota(b.begin(), b.end(), s + 1);
            CHECK(renyi_entropy(partial_trace(psi, a), 2) ==
                  doctest::Approx(renyi_entropy(partial_trace(psi, b), 2)).epsilon(1e-9));
        }
    }
}

TEST_CASE("sample_measurements: determinism and frequencies") {
    Eigen::VectorXcd ground = Eigen::VectorXcd::Zero(4);
    ground(0) = 1.0;
    const Dataset all_zero = sample_measurements(QuantumState::pure(2, ground), 100, 1);
    for (BasisIndex s : all_zero.samples) CHECK(s == 0);

    const Dataset a = sample_measurements(approx_z2_state(), 100000, 42);
    const Dataset b = sample_measurements(approx_z2_state(), 100000, 42);
    CHECK(a.samples == b.samples);
    CHECK(a.meta.n_sites == 8);
    CHECK(a.meta.seed == 42);

    // multinomial 3-sigma window around (0.5, 0.25, 0.25)
    const Eigen::VectorXd freq = a.empirical_distribution();
    const double se_half = std::sqrt(0.5 * 0.5 / 100000.0);
    const double se_quarter = std::sqrt(0.25 * 0.75 / 100000.0);
    CHECK(std::abs(freq(string_to_index("10100101")) - 0.50) < 3.0 * se_half);
    CHECK(std::abs(freq(string_to_index("10010101")) - 0.25) < 3.0 * se_quarter);
    CHECK(std::abs(freq(string_to_index("10101001")) - 0.25) < 3.0 * se_quarter);

    const Dataset c = sample_measurements(approx_z2_state(), 100000, 43);
    CHECK(a.samples != c.samples);
}

TEST_CASE("quantum state invariants validated") {
    Eigen::VectorXcd bad(4);
    bad.setConstant(1.0);
    CHECK_THROWS_AS(QuantumState::pure(2, bad).validate(), NumericError);
    Eigen::MatrixXcd not_herm = Eigen::MatrixXcd::Zero(2, 2);
    not_herm(0, 1) = 1.0;
    not_herm(0, 0) = 1.0;
    CHECK_THROWS_AS(QuantumState::mixed(1, not_herm).validate(), NumericError);
}
