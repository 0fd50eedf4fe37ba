#ifndef RBMTOMO_ESTIMATORS_HPP
#define RBMTOMO_ESTIMATORS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "rbmtomo/dataset.hpp"
#include "rbmtomo/noise.hpp"
#include "rbmtomo/rbm.hpp"

namespace rbmtomo {

struct ObservableResult {
    std::string name;
    double value = 0.0;
    double std_error = 0.0;
    std::int64_t n_samples = 0;
    std::string method; // "exact" | "monte-carlo" | "dataset"
    std::vector<int> sites;
    std::uint64_t seed = 0;
};

/// Monte Carlo controls for the local-estimator and swap estimators.
struct McOptions {
    std::int64_t n_mc = 100000;
    int n_chains = 32;
    int burn_in = 500;   // discarded sweeps per chain
    int bin_size = 100;  // consecutive samples per error bin
};

// sigma^z = 2n - 1, so bit 1 maps to eigenvalue +1.

/// <z_i z_j> - <z_i><z_j> from dataset frequencies; jackknife errors.
ObservableResult diagonal_correlator(const Dataset& d, int i, int j);
/// Same from the exact RBM distribution (N within enumeration cap).
ObservableResult diagonal_correlator(const RbmParams& rbm, int i, int j);

/// (1/(N-s)) sum_i <z_i z_{i+s}>_c.
ObservableResult avg_correlator(const Dataset& d, int s);
ObservableResult avg_correlator(const RbmParams& rbm, int s);

/// A few-site operator given by its site list and dense matrix in the local
/// occupation basis (row/col index bits ordered like the site list).
struct LocalOperator {
    std::vector<int> sites;  // 1-based, distinct
    Eigen::MatrixXd matrix;  // 2^k x 2^k, k = sites.size() <= 3
};

/// Monte Carlo average of the local estimate
///   O_L(sigma) = sum_{sigma'} <sigma|O|sigma'> psi(sigma')/psi(sigma)
/// over block-Gibbs samples; binned standard error.
ObservableResult local_estimator_expectation(const RbmParams& rbm, const LocalOperator& op,
                                             std::uint64_t seed, const McOptions& mc = {});

/// <sx_i> for every site, one shared sampling pass.
std::vector<ObservableResult> transverse_profile(const RbmParams& rbm, std::uint64_t seed,
                                                 const McOptions& mc = {});

/// <sx_i sx_{i+1}> - <sx_i><sx_{i+1}> with jackknife-over-bins errors.
ObservableResult xx_connected(const RbmParams& rbm, int i, std::uint64_t seed,
                              const McOptions& mc = {});

/// Two-replica swap estimate of Tr rho_A^2; returns S2 = -log(mean).
/// Replica streams are seeded independently.
ObservableResult renyi2_swap(const RbmParams& rbm, const std::vector<int>& region,
                             std::uint64_t seed, const McOptions& mc = {});

/// Exact S2 of the reduced state of the RBM wavefunction on sites {1..s}.
double renyi2_exact(const RbmParams& rbm, const std::vector<int>& region);

/// I2(s) = S2(A) + S2(B) for the pure RBM state (S2 of the whole state is 0).
/// use_mc selects the swap-trick path; otherwise exact enumeration.
ObservableResult mutual_information_rbm(const RbmParams& rbm, int cut_bond, bool use_mc,
                                        std::uint64_t seed, const McOptions& mc = {});

/// Diagonal observables evaluated under the noise-corrupted model
/// distribution: sigma ~ Gibbs, tau ~ channel(sigma).
struct DiagonalSpec {
    enum class Kind { MeanN, ZzConnected, GzzAvg } kind = Kind::MeanN;
    int i = 1; // site (MeanN), first site (ZzConnected), distance (GzzAvg)
    int j = 1; // second site (ZzConnected)
    std::string name() const;
};

ObservableResult forward_noise(const RbmParams& rbm, const NoiseModel& nm,
                               const DiagonalSpec& obs, std::uint64_t seed,
                               const McOptions& mc = {});

} // namespace rbmtomo

#endif
