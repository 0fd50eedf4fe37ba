#include <CLI11.hpp>
#include <iostream>
#include <thread>

#include "rbmtomo/pipeline.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitProvenance = 4;

rbmtomo::ExperimentConfig load(const std::string& config_path, std::int64_t seed_override,
                               const std::string& out_override) {
    rbmtomo::ExperimentConfig cfg = config_path.empty()
                                        ? rbmtomo::ExperimentConfig{}
                                        : rbmtomo::load_config(config_path);
    if (seed_override >= 0) {
        cfg.dataset.seed = static_cast<std::uint64_t>(seed_override);
        cfg.train.seed = static_cast<std::uint64_t>(seed_override);
        cfg.evaluate.seed = static_cast<std::uint64_t>(seed_override);
    }
    if (!out_override.empty()) cfg.output_dir = out_override;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"RBM reconstruction of Rydberg-chain states from bit-string measurements"};
    app.require_subcommand(1);

    std::string config_path;
    std::int64_t seed_override = -1;
    std::string out_override;
    int threads = 0;
    bool quiet = false;
    app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
    app.add_option("--seed", seed_override, "override dataset/train/evaluate seeds");
    app.add_option("--out", out_override, "override the output directory");
    app.add_option("--threads", threads, "worker threads (0 = auto)");
    app.add_flag("--quiet", quiet, "suppress progress output");

    auto* generate = app.add_subcommand("generate", "evolve states and sample datasets");
    auto* corrupt = app.add_subcommand("corrupt", "apply the measurement channel to a dataset");
    auto* train_cmd = app.add_subcommand("train", "fit an RBM to a dataset");
    auto* evaluate = app.add_subcommand("evaluate", "compute observables from a model");
    auto* sweep = app.add_subcommand("sweep", "full pipeline over all checkpoints");
    auto* report = app.add_subcommand("report", "merge per-checkpoint results");

    std::string in_stem, out_stem, dataset_stem, out_prefix, model_path, out_csv, fd_stem, dir;
    corrupt->add_option("--in", in_stem, "input dataset stem")->required();
    corrupt->add_option("--out-stem", out_stem, "output dataset stem")->required();
    train_cmd->add_option("--data", dataset_stem, "dataset stem")->required();
    train_cmd->add_option("--prefix", out_prefix, "output prefix")->required();
    evaluate->add_option("--model", model_path, "model checkpoint JSON")->required();
    evaluate->add_option("--csv", out_csv, "output CSV")->required();
    evaluate->add_option("--fd", fd_stem, "dataset stem for FD baseline columns");
    report->add_option("--dir", dir, "sweep output directory");

    CLI11_PARSE(app, argc, argv);

    if (threads <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        threads = hw == 0 ? 1 : static_cast<int>(hw);
    }

    try {
        const rbmtomo::ExperimentConfig cfg = load(config_path, seed_override, out_override);
        if (generate->parsed()) {
            rbmtomo::cmd_generate(cfg, threads, quiet);
        } else if (corrupt->parsed()) {
            rbmtomo::cmd_corrupt(cfg, in_stem, out_stem);
        } else if (train_cmd->parsed()) {
            rbmtomo::cmd_train(cfg, dataset_stem, out_prefix, quiet);
        } else if (evaluate->parsed()) {
            rbmtomo::cmd_evaluate(cfg, model_path, out_csv, fd_stem, quiet);
        } else if (sweep->parsed()) {
            rbmtomo::cmd_sweep(cfg, threads, quiet);
        } else if (report->parsed()) {
            rbmtomo::cmd_report(dir.empty() ? cfg.output_dir : dir, quiet);
        }
    } catch (const rbmtomo::ProvenanceError& e) {
        std::cerr << "provenance error: " << e.what() << "\n";
        return kExitProvenance;
    } catch (const rbmtomo::ArgumentError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
