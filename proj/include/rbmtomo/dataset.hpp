#ifndef RBMTOMO_DATASET_HPP
#define RBMTOMO_DATASET_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rbmtomo/common.hpp"

namespace rbmtomo {

struct NoiseModel; // noise.hpp

struct DatasetMeta {
    int n_sites = 0;
    std::uint64_t seed = 0;
    std::string source;              // free-form provenance description
    std::optional<double> p10;       // measurement error rates, when corrupted
    std::optional<double> p01;
    std::optional<double> sweep_time_us;
    std::string config_hash;         // hex; empty when not produced by the pipeline
};

/// Ordered multiset of measured bit strings. Samples are stored as basis
/// indices (site 1 = MSB), which keeps the container compact up to N = 20.
struct Dataset {
    DatasetMeta meta;
    std::vector<BasisIndex> samples;

    std::int64_t size() const { return static_cast<std::int64_t>(samples.size()); }
    int n_sites() const { return meta.n_sites; }

    /// Visible states as a column-per-sample 0/1 matrix (N x M), the layout
    /// used by the batched Gibbs kernels.
    Eigen::MatrixXd to_columns() const;

    /// Empirical distribution over all 2^N configurations (N <= 20).
    Eigen::VectorXd empirical_distribution() const;
};

Dataset make_dataset(int n_sites, std::vector<BasisIndex> samples, DatasetMeta meta = {});

} // namespace rbmtomo

#endif
