#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>

#include "helpers.hpp"
#include "rbmtomo/estimators.hpp"
#include "rbmtomo/hamiltonian.hpp"
#include "rbmtomo/training.hpp"

using namespace rbmtomo;

namespace {

// one shared reconstruction of the three-configuration ordered state
const RbmParams& z2_trained_rbm() {
    static const TrainReport report = [] {
        const Dataset d = sample_measurements(approx_z2_state(), 3000, 21, "z2");
        TrainConfig cfg;
        cfg.epochs = 500;
        cfg.seed = 7;
        return train(d, cfg);
    }();
    return report.final_params;
}

double exact_sx(const RbmParams& rbm, int site) {
    const Eigen::VectorXd psi = probability_table(rbm).cwiseSqrt();
    const int n = rbm.n_visible();
    double acc = 0.0;
    for (Eigen::Index s = 0; s < psi.size(); ++s)
        acc += psi(s) * psi(flip_site(static_cast<BasisIndex>(s), site, n));
    return acc;
}

double exact_sxsx(const RbmParams& rbm, int site) {
    const Eigen::VectorXd psi = probability_table(rbm).cwiseSqrt();
    const int n = rbm.n_visible();
    double acc = 0.0;
    for (Eigen::Index s = 0; s < psi.size(); ++s)
        acc += psi(s) *
               psi(flip_site(flip_site(static_cast<BasisIndex>(s), site, n), site + 1, n));
    return acc;
}

RbmParams uniform_rbm(int n, int nh) {
    RbmParams rbm;
    rbm.weights = Eigen::MatrixXd::Zero(nh, n);
    rbm.visible_bias = Eigen::VectorXd::Zero(n);
    rbm.hidden_bias = Eigen::VectorXd::Zero(nh);
    return rbm;
}

} // namespace

TEST_CASE("diagonal_correlator: product data, three-configuration state, frozen dataset") {
    // uncorrelated biased coins
    std::vector<BasisIndex> flips;
    Rng rng(5);
    for (int k = 0; k < 20000; ++k) {
        BasisIndex s = 0;
        for (int i = 0; i < 4; ++i) s = (s << 1) | static_cast<BasisIndex>(rng.bernoulli(0.3));
        flips.push_back(s);
    }
    const Dataset product = make_dataset(4, flips, {});
    const ObservableResult r = diagonal_correlator(product, 1, 3);
    CHECK(std::abs(r.value) < 3.0 * r.std_error + 1e-6);

    // hand enumeration of the 3-configuration superposition at sites (3,4):
    // <z3 z4> = -1, <z3> = 1/2, <z4> = -1/2 -> connected = -3/4
    const ObservableResult exact = diagonal_correlator(z2_trained_rbm(), 3, 4);
    const Dataset d = sample_measurements(approx_z2_state(), 100000, 9, "z2");
    const ObservableResult sampled = diagonal_correlator(d, 3, 4);
    CHECK(std::abs(sampled.value - (-0.75)) < 3.0 * sampled.std_error);
    CHECK(exact.method == "exact");

    // perfect alternating string: zero variance, zero connected correlator
    const Dataset z2_string =
        make_dataset(8, std::vector<BasisIndex>(100, string_to_index("10101010")), {});
    const ObservableResult det = diagonal_correlator(z2_string, 2, 5);
    CHECK(det.value == doctest::Approx(0.0));
    CHECK(det.std_error == doctest::Approx(0.0));

    CHECK_THROWS_AS(diagonal_correlator(d, 0, 3), ArgumentError);
    CHECK_THROWS_AS(diagonal_correlator(d, 1, 9), ArgumentError);
}

TEST_CASE("avg_correlator: single-pair limit and uncorrelated data") {
    const Dataset d = sample_measurements(approx_z2_state(), 20000, 13, "z2");
    const ObservableResult top = avg_correlator(d, 7);
    const ObservableResult pair = diagonal_correlator(d, 1, 8);
    CHECK(top.value == doctest::Approx(pair.value));

    std::vector<BasisIndex> coins;
    Rng rng(17);
    for (int k = 0; k < 20000; ++k) {
        BasisIndex s = 0;
        for (int i = 0; i < 4; ++i) s = (s << 1) | static_cast<BasisIndex>(rng.bernoulli(0.5));
        coins.push_back(s);
    }
    const ObservableResult flat = avg_correlator(make_dataset(4, coins, {}), 1);
    CHECK(std::abs(flat.value) < 3.0 * flat.std_error + 1e-6);
    CHECK_THROWS_AS(avg_correlator(d, 8), ArgumentError);
}

TEST_CASE("avg_correlator: reconstruction matches the generating state") {
    const QuantumState z2 = approx_z2_state();
    // exact g_zz(1) of the generating state, via its probability vector
    const Eigen::VectorXd p = z2.probabilities();
    auto z_of = [&](BasisIndex s, int i) { return bit_at(s, i, 8) ? 1.0 : -1.0; };
    double gzz = 0.0;
    for (int i = 1; i <= 7; ++i) {
        double eij = 0.0, ei = 0.0, ej = 0.0;
        for (Eigen::Index s = 0; s < p.size(); ++s) {
            eij += p(s) * z_of(static_cast<BasisIndex>(s), i) * z_of(static_cast<BasisIndex>(s), i + 1);
            ei += p(s) * z_of(static_cast<BasisIndex>(s), i);
            ej += p(s) * z_of(static_cast<BasisIndex>(s), i + 1);
        }
        gzz += eij - ei * ej;
    }
    gzz /= 7.0;
    const ObservableResult got = avg_correlator(z2_trained_rbm(), 1);
    CHECK(std::abs(got.value - gzz) < 0.02);
}

TEST_CASE("local_estimator: diagonal, uniform-state sigma-x, exact oracle") {
    McOptions mc;
    mc.n_mc = 20000;

    // uniform model: psi ratios are 1, so <sx_i> = 1 with zero scatter
    const RbmParams uniform = uniform_rbm(4, 4);
    LocalOperator sx;
    sx.sites = {2};
    sx.matrix.resize(2, 2);
    sx.matrix << 0, 1, 1, 0;
    const ObservableResult one = local_estimator_expectation(uniform, sx, 3, mc);
    CHECK(one.value == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(one.std_error == doctest::Approx(0.0));

    // diagonal operator reduces to a bit frequency
    const RbmParams rbm = oracle::random_rbm(4, 4, 19, 0.8);
    LocalOperator n_op;
    n_op.sites = {1};
    n_op.matrix.resize(2, 2);
    n_op.matrix << 0, 0, 0, 1;
    const ObservableResult freq = local_estimator_expectation(rbm, n_op, 5, mc);
    const Eigen::VectorXd p = probability_table(rbm);
    double exact_n = 0.0;
    for (Eigen::Index s = 0; s < p.size(); ++s)
        exact_n += p(s) * bit_at(static_cast<BasisIndex>(s), 1, 4);
    CHECK(std::abs(freq.value - exact_n) < 3.0 * freq.std_error + 1e-3);

    const ObservableResult x2 = local_estimator_expectation(rbm, sx, 7, mc);
    CHECK(std::abs(x2.value - exact_sx(rbm, 2)) < 3.0 * x2.std_error + 1e-3);

    LocalOperator too_big;
    too_big.sites = {1, 2, 3, 4};
    too_big.matrix = Eigen::MatrixXd::Zero(16, 16);
    CHECK_THROWS_AS(local_estimator_expectation(rbm, too_big, 3, mc), ArgumentError);
}

TEST_CASE("transverse_profile and xx_connected: exact oracle at N=4") {
    const RbmParams rbm = oracle::random_rbm(4, 4, 23, 0.7);
    McOptions mc;
    mc.n_mc = 40000;
    const auto profile = transverse_profile(rbm, 31, mc);
    REQUIRE(profile.size() == 4);
    for (int i = 1; i <= 4; ++i)
        CHECK(std::abs(profile[static_cast<std::size_t>(i - 1)].value - exact_sx(rbm, i)) <
              3.0 * profile[static_cast<std::size_t>(i - 1)].std_error + 2e-3);

    for (int i = 1; i <= 3; ++i) {
        const ObservableResult xx = xx_connected(rbm, i, 37, mc);
        const double exact = exact_sxsx(rbm, i) - exact_sx(rbm, i) * exact_sx(rbm, i + 1);
        CHECK(std::abs(xx.value - exact) < 3.0 * xx.std_error + 2e-3);
    }
}

TEST_CASE("xx_connected: fluctuation peaks at bonds (3,4) and (5,6)") {
    const RbmParams& rbm = z2_trained_rbm();
    McOptions mc;
    mc.n_mc = 50000;
    std::vector<double> values;
    for (int i = 1; i <= 7; ++i) values.push_back(xx_connected(rbm, i, 100 + i, mc).value);
    for (int i = 1; i <= 7; ++i) {
        if (i == 3 || i == 5) continue;
        CHECK(values[2] > values[static_cast<std::size_t>(i - 1)]);
        CHECK(values[4] > values[static_cast<std::size_t>(i - 1)]);
    }
}

TEST_CASE("transverse field of a frozen product state is tiny") {
    const Dataset d =
        make_dataset(4, std::vector<BasisIndex>(2000, string_to_index("0000")), {});
    TrainConfig cfg;
    cfg.n_hidden = 8;
    cfg.epochs = 300;
    cfg.learning_rate = 0.1;
    cfg.cd_steps = 10;
    cfg.seed = 3;
    cfg.validation_split = 0.0;
    const RbmParams rbm = train(d, cfg).final_params;
    McOptions mc;
    mc.n_mc = 20000;
    for (const auto& r : transverse_profile(rbm, 5, mc)) CHECK(std::abs(r.value) < 0.05);
}

TEST_CASE("renyi2_swap: product states carry no entanglement") {
    RbmParams product = uniform_rbm(4, 4);
    product.visible_bias << 0.7, -0.4, 1.1, 0.0; // arbitrary product distribution
    McOptions mc;
    mc.n_mc = 50000;
    const ObservableResult s2 = renyi2_swap(product, {1, 2}, 11, mc);
    CHECK(std::abs(s2.value) < 3.0 * s2.std_error + 1e-3);

    const ObservableResult s2_uniform = renyi2_swap(uniform_rbm(3, 3), {1}, 13, mc);
    CHECK(std::abs(s2_uniform.value) < 3.0 * s2_uniform.std_error + 1e-3);
}

TEST_CASE("swap estimator: exact pair enumeration equals Tr rho_A^2") {
    for (int n : {3, 4, 6}) {
        const RbmParams rbm = oracle::random_rbm(n, 4, 200 + n, 0.8);
        const Eigen::VectorXd p = probability_table(rbm);
        const Eigen::VectorXd psi = p.cwiseSqrt();
        const int s = n / 2;
        BasisIndex mask = 0;
        for (int site = 1; site <= s; ++site) mask |= BasisIndex{1} << (n - site);

        double swap_mean = 0.0;
        for (Eigen::Index a = 0; a < p.size(); ++a) {
            for (Eigen::Index b = 0; b < p.size(); ++b) {
                const BasisIndex ma = (static_cast<BasisIndex>(b) & mask) |
                                      (static_cast<BasisIndex>(a) & ~mask);
                const BasisIndex mb = (static_cast<BasisIndex>(a) & mask) |
                                      (static_cast<BasisIndex>(b) & ~mask);
                swap_mean += p(a) * p(b) * (psi(ma) * psi(mb)) / (psi(a) * psi(b));
            }
        }
        std::vector<int> region(static_cast<std::size_t>(s));
        std::iota(region.begin(), region.end(), 1);
        CHECK(-std::log(swap_mean) == doctest::Approx(renyi2_exact(rbm, region)).epsilon(1e-10));
    }
}

TEST_CASE("renyi2 of the reconstructed ordered state") {
    const RbmParams& rbm = z2_trained_rbm();
    McOptions mc;
    mc.n_mc = 100000;
    const double exact = renyi2_exact(rbm, {1, 2, 3});
    const ObservableResult swap = renyi2_swap(rbm, {1, 2, 3}, 17, mc);
    // partial-trace value of the generating state: -log(5/8)
    CHECK(std::abs(exact - 0.4700036292457356) < 0.03);
    CHECK(std::abs(swap.value - exact) < 3.0 * swap.std_error + 0.03);
}

TEST_CASE("mutual_information_rbm: product, reconstructed state, path consistency") {
    RbmParams product = uniform_rbm(4, 4);
    product.visible_bias << 0.5, 0.5, -0.5, 0.2;
    McOptions mc;
    mc.n_mc = 50000;
    CHECK(std::abs(mutual_information_rbm(product, 2, false, 3, mc).value) < 1e-9);

    const RbmParams& rbm = z2_trained_rbm();
    const ObservableResult exact = mutual_information_rbm(rbm, 3, false, 5, mc);
    CHECK(std::abs(exact.value - 0.9400072584914716) < 0.06);

    const ObservableResult sampled = mutual_information_rbm(rbm, 3, true, 7, mc);
    CHECK(std::abs(sampled.value - exact.value) < 3.0 * sampled.std_error);

    // Schmidt symmetry of the two halves, exact and sampled
    std::vector<int> a{1, 2, 3}, b{4, 5, 6, 7, 8};
    CHECK(renyi2_exact(rbm, a) == doctest::Approx(renyi2_exact(rbm, b)).epsilon(1e-9));
    const ObservableResult sa = renyi2_swap(rbm, a, 19, mc);
    const ObservableResult sb = renyi2_swap(rbm, b, 23, mc);
    CHECK(std::abs(sa.value - sb.value) <
          3.0 * std::sqrt(sa.std_error * sa.std_error + sb.std_error * sb.std_error) + 0.01);
}

TEST_CASE("forward_noise: identity channel, saturated limit, corrupted-data consistency") {
    const RbmParams& rbm = z2_trained_rbm();
    McOptions mc;
    mc.n_mc = 50000;

    DiagonalSpec mean_n;
    mean_n.kind = DiagonalSpec::Kind::MeanN;
    mean_n.i = 1;
    const ObservableResult clean = forward_noise(rbm, NoiseModel{0.0, 0.0}, mean_n, 3, mc);
    const Eigen::VectorXd p = probability_table(rbm);
    double exact_n1 = 0.0;
    for (Eigen::Index s = 0; s < p.size(); ++s)
        exact_n1 += p(s) * bit_at(static_cast<BasisIndex>(s), 1, 8);
    CHECK(std::abs(clean.value - exact_n1) < 3.0 * clean.std_error + 1e-3);

    // all-ones limit: site 1 is deterministically excited, channel keeps 96%
    RbmParams ones = uniform_rbm(2, 2);
    ones.visible_bias << 25.0, 25.0;
    DiagonalSpec n1;
    n1.kind = DiagonalSpec::Kind::MeanN;
    n1.i = 1;
    const ObservableResult noisy = forward_noise(ones, NoiseModel{0.01, 0.04}, n1, 5, mc);
    CHECK(noisy.value == doctest::Approx(0.96).epsilon(0.01));

    // forward-noised model statistic vs the statistic of a corrupted dataset
    DiagonalSpec gzz;
    gzz.kind = DiagonalSpec::Kind::GzzAvg;
    gzz.i = 1;
    const ObservableResult model_side =
        forward_noise(rbm, NoiseModel{0.01, 0.04}, gzz, 7, mc);
    Dataset data = sample_measurements(approx_z2_state(), 100000, 29, "z2");
    data = corrupt_dataset(data, NoiseModel{0.01, 0.04}, 31);
    const ObservableResult data_side = avg_correlator(data, 1);
    const double joint_se = std::sqrt(model_side.std_error * model_side.std_error +
                                      data_side.std_error * data_side.std_error);
    CHECK(std::abs(model_side.value - data_side.value) < 3.0 * joint_se + 0.02);
}
