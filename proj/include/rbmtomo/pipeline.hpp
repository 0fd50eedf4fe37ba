#ifndef RBMTOMO_PIPELINE_HPP
#define RBMTOMO_PIPELINE_HPP

#include <string>
#include <vector>

#include "rbmtomo/config.hpp"
#include "rbmtomo/dataset.hpp"
#include "rbmtomo/estimators.hpp"
#include "rbmtomo/rbm.hpp"
#include "rbmtomo/state.hpp"
#include "rbmtomo/training.hpp"

namespace rbmtomo {

// File formats (all bit-exact on round trip):
//  - dataset:        <stem>.txt    one '0'/'1' line per sample, site 1 first
//                    <stem>.json   sidecar metadata
//  - rbm checkpoint: JSON with dimensions, row-major weights, biases
//  - state:          JSON with kind and amplitudes / density entries
//  - reports:        CSV with a "# rbmtomo ..." provenance comment line

void write_dataset(const Dataset& d, const std::string& stem);
Dataset read_dataset(const std::string& stem);

void write_rbm(const RbmParams& rbm, const std::string& path, const std::string& config_hash = "");
RbmParams read_rbm(const std::string& path, std::string* config_hash = nullptr);

void write_state(const QuantumState& state, const std::string& path,
                 const std::string& config_hash = "");
QuantumState read_state(const std::string& path, std::string* config_hash = nullptr);

void write_train_report(const TrainReport& report, const std::string& json_path,
                        const std::string& curve_csv_path);

void write_observables_csv(const std::vector<ObservableResult>& results, const std::string& path,
                           const std::string& config_hash);

struct CheckpointArtifacts {
    double t_us = 0.0;
    double delta_mhz = 0.0;
    double omega_mhz = 0.0;
    std::string dataset_stem; // relative to output dir
    std::string state_path;
};

/// generate: evolves (ground-state or Lindblad mode), samples each sweep
/// checkpoint, writes dataset + state files and a manifest.
std::vector<CheckpointArtifacts> cmd_generate(const ExperimentConfig& cfg, int threads = 1,
                                              bool quiet = false);

/// corrupt: applies the channel to a dataset file.
void cmd_corrupt(const ExperimentConfig& cfg, const std::string& in_stem,
                 const std::string& out_stem);

/// train: fits an RBM to a dataset file; writes model checkpoint, report and
/// training curves next to `out_prefix`.
TrainReport cmd_train(const ExperimentConfig& cfg, const std::string& dataset_stem,
                      const std::string& out_prefix, bool quiet = false);

/// evaluate: computes the configured observables from a model checkpoint
/// (plus optional FD baseline columns from the matching dataset).
std::vector<ObservableResult> cmd_evaluate(const ExperimentConfig& cfg,
                                           const std::string& model_path,
                                           const std::string& out_csv,
                                           const std::string& fd_dataset_stem = "",
                                           bool quiet = false);

/// sweep: generate -> (corrupt) -> train -> evaluate for every checkpoint.
void cmd_sweep(const ExperimentConfig& cfg, int threads = 1, bool quiet = false);

/// report: merges per-checkpoint observable CSVs in a sweep output directory
/// into tidy tables keyed by sweep time.
void cmd_report(const std::string& directory, bool quiet = false);

} // namespace rbmtomo

#endif
