#include "rbmtomo/dataset.hpp"

namespace rbmtomo {

Eigen::MatrixXd Dataset::to_columns() const {
    const int n = meta.n_sites;
    Eigen::MatrixXd cols(n, static_cast<Eigen::Index>(samples.size()));
    for (Eigen::Index m = 0; m < cols.cols(); ++m) {
        const BasisIndex s = samples[static_cast<std::size_t>(m)];
        for (int i = 1; i <= n; ++i) cols(i - 1, m) = bit_at(s, i, n);
    }
    return cols;
}

Eigen::VectorXd Dataset::empirical_distribution() const {
    const int n = meta.n_sites;
    if (n > 20) throw ResourceError("empirical_distribution: N exceeds enumeration cap");
    Eigen::VectorXd p = Eigen::VectorXd::Zero(Eigen::Index{1} << n);
    for (BasisIndex s : samples) p(s) += 1.0;
    if (!samples.empty()) p /= static_cast<double>(samples.size());
    return p;
}

Dataset make_dataset(int n_sites, std::vector<BasisIndex> samples, DatasetMeta meta) {
    if (n_sites < 1 || n_sites > 31) throw ArgumentError("make_dataset: unsupported n_sites");
    meta.n_sites = n_sites;
    Dataset d;
    d.meta = std::move(meta);
    d.samples = std::move(samples);
    return d;
}

} // namespace rbmtomo
