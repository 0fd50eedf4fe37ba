#include "rbmtomo/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numeric>
#include <sstream>

#include "rbmtomo/fd_model.hpp"
#include "rbmtomo/hamiltonian.hpp"
#include "rbmtomo/lindblad.hpp"

namespace rbmtomo {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ArgumentError(message);
}

void check_hash(const std::string& artifact, const std::string& found,
                const std::string& expected) {
    if (expected.empty() || found.empty()) return;
    if (found != expected)
        throw ProvenanceError(artifact + ": config hash " + found +
                              " does not match the active config " + expected);
}

json meta_to_json(const DatasetMeta& meta, std::int64_t n_samples) {
    json j;
    j["schema"] = "rbmtomo-dataset-v1";
    j["n_sites"] = meta.n_sites;
    j["n_samples"] = n_samples;
    j["seed"] = meta.seed;
    j["source"] = meta.source;
    if (meta.p10 && meta.p01) {
        j["noise"] = {{"p10", *meta.p10}, {"p01", *meta.p01}};
    } else {
        j["noise"] = nullptr;
    }
    if (meta.sweep_time_us) {
        j["sweep_time_us"] = *meta.sweep_time_us;
    } else {
        j["sweep_time_us"] = nullptr;
    }
    j["config_hash"] = meta.config_hash;
    return j;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary); // binary: fixed newlines everywhere
    if (!out) throw ArgumentError("cannot open for writing: " + path);
    return out;
}

json load_json(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot open: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ArgumentError(path + ": " + e.what());
    }
    return j;
}

} // namespace

void write_dataset(const Dataset& d, const std::string& stem) {
    auto body = open_out(stem + ".txt");
    for (BasisIndex s : d.samples) body << index_to_string(s, d.meta.n_sites) << '\n';
    auto sidecar = open_out(stem + ".json");
    sidecar << meta_to_json(d.meta, d.size()).dump(2) << '\n';
}

Dataset read_dataset(const std::string& stem) {
    const json j = load_json(stem + ".json");
    require(j.value("schema", "") == "rbmtomo-dataset-v1", stem + ".json: unknown schema");
    DatasetMeta meta;
    meta.n_sites = j.at("n_sites").get<int>();
    meta.seed = j.at("seed").get<std::uint64_t>();
    meta.source = j.value("source", "");
    if (j.contains("noise") && !j.at("noise").is_null()) {
        meta.p10 = j.at("noise").at("p10").get<double>();
        meta.p01 = j.at("noise").at("p01").get<double>();
    }
    if (j.contains("sweep_time_us") && !j.at("sweep_time_us").is_null())
        meta.sweep_time_us = j.at("sweep_time_us").get<double>();
    meta.config_hash = j.value("config_hash", "");

    std::ifstream body(stem + ".txt", std::ios::binary);
    require(static_cast<bool>(body), "cannot open: " + stem + ".txt");
    std::vector<BasisIndex> samples;
    std::string line;
    while (std::getline(body, line)) {
        if (line.empty()) continue;
        require(static_cast<int>(line.size()) == meta.n_sites,
                stem + ".txt: line length does not match n_sites");
        samples.push_back(string_to_index(line));
    }
    const auto expected = j.at("n_samples").get<std::int64_t>();
    require(static_cast<std::int64_t>(samples.size()) == expected,
            stem + ".txt: sample count does not match sidecar");
    return make_dataset(meta.n_sites, std::move(samples), std::move(meta));
}

void write_rbm(const RbmParams& rbm, const std::string& path, const std::string& config_hash) {
    rbm.validate();
    json j;
    j["schema"] = "rbmtomo-rbm-v1";
    j["n_visible"] = rbm.n_visible();
    j["n_hidden"] = rbm.n_hidden();
    std::vector<double> w(static_cast<std::size_t>(rbm.weights.size()));
    for (int r = 0; r < rbm.weights.rows(); ++r)
        for (int c = 0; c < rbm.weights.cols(); ++c)
            w[static_cast<std::size_t>(r) * rbm.weights.cols() + c] = rbm.weights(r, c);
    j["weights_row_major"] = w;
    j["visible_bias"] = std::vector<double>(rbm.visible_bias.data(),
                                            rbm.visible_bias.data() + rbm.visible_bias.size());
    j["hidden_bias"] = std::vector<double>(rbm.hidden_bias.data(),
                                           rbm.hidden_bias.data() + rbm.hidden_bias.size());
    j["config_hash"] = config_hash;
    open_out(path) << j.dump(2) << '\n';
}

RbmParams read_rbm(const std::string& path, std::string* config_hash) {
    const json j = load_json(path);
    require(j.value("schema", "") == "rbmtomo-rbm-v1", path + ": unknown schema");
    const int nv = j.at("n_visible").get<int>();
    const int nh = j.at("n_hidden").get<int>();
    const auto w = j.at("weights_row_major").get<std::vector<double>>();
    require(static_cast<int>(w.size()) == nv * nh, path + ": weight count mismatch");
    RbmParams rbm;
    rbm.weights.resize(nh, nv);
    for (int r = 0; r < nh; ++r)
        for (int c = 0; c < nv; ++c) rbm.weights(r, c) = w[static_cast<std::size_t>(r) * nv + c];
    const auto vb = j.at("visible_bias").get<std::vector<double>>();
    const auto hb = j.at("hidden_bias").get<std::vector<double>>();
    require(static_cast<int>(vb.size()) == nv && static_cast<int>(hb.size()) == nh,
            path + ": bias length mismatch");
    rbm.visible_bias = Eigen::Map<const Eigen::VectorXd>(vb.data(), nv);
    rbm.hidden_bias = Eigen::Map<const Eigen::VectorXd>(hb.data(), nh);
    if (config_hash) *config_hash = j.value("config_hash", "");
    rbm.validate();
    return rbm;
}

void write_state(const QuantumState& state, const std::string& path,
                 const std::string& config_hash) {
    json j;
    j["schema"] = "rbmtomo-state-v1";
    j["n_sites"] = state.n_sites();
    j["kind"] = state.is_pure() ? "pure" : "mixed";
    j["config_hash"] = config_hash;
    auto entry = [](std::complex<double> z) { return json::array({z.real(), z.imag()}); };
    if (state.is_pure()) {
        json amps = json::array();
        for (Eigen::Index i = 0; i < state.amplitudes().size(); ++i)
            amps.push_back(entry(state.amplitudes()(i)));
        j["amplitudes"] = std::move(amps);
    } else {
        json rows = json::array();
        for (Eigen::Index r = 0; r < state.density().rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < state.density().cols(); ++c)
                row.push_back(entry(state.density()(r, c)));
            rows.push_back(std::move(row));
        }
        j["density"] = std::move(rows);
    }
    open_out(path) << j.dump() << '\n';
}

QuantumState read_state(const std::string& path, std::string* config_hash) {
    const json j = load_json(path);
    require(j.value("schema", "") == "rbmtomo-state-v1", path + ": unknown schema");
    const int n = j.at("n_sites").get<int>();
    if (config_hash) *config_hash = j.value("config_hash", "");
    auto entry = [](const json& e) { return std::complex<double>(e[0], e[1]); };
    if (j.at("kind") == "pure") {
        const json& amps = j.at("amplitudes");
        Eigen::VectorXcd v(amps.size());
        for (std::size_t i = 0; i < amps.size(); ++i)
            v(static_cast<Eigen::Index>(i)) = entry(amps[i]);
        return QuantumState::pure(n, std::move(v));
    }
    const json& rows = j.at("density");
    Eigen::MatrixXcd rho(rows.size(), rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = entry(rows[r][c]);
    return QuantumState::mixed(n, std::move(rho));
}

void write_train_report(const TrainReport& report, const std::string& json_path,
                        const std::string& curve_csv_path) {
    json j;
    j["schema"] = "rbmtomo-train-report-v1";
    j["nll_epochs"] = report.nll_epochs;
    j["nll"] = report.nll;
    j["val_nll"] = report.val_nll;
    j["grad_norm"] = report.grad_norm;
    j["lr"] = report.lr;
    j["wall_time_s"] = report.wall_time_s;
    j["val_drift_warning"] = report.val_drift_warning;
    j["config_hash"] = report.config_hash;
    j["n_snapshots"] = report.snapshots.size();
    open_out(json_path) << j.dump(2) << '\n';

    auto csv = open_out(curve_csv_path);
    csv << "# rbmtomo-curves v1 config=" << report.config_hash << "\n";
    csv << "epoch,nll,val_nll,grad_norm,lr\n";
    csv.precision(17);
    std::size_t k = 0;
    for (std::size_t epoch = 0; epoch < report.grad_norm.size(); ++epoch) {
        csv << epoch << ',';
        if (k < report.nll_epochs.size() &&
            report.nll_epochs[k] == static_cast<int>(epoch)) {
            csv << report.nll[k] << ',';
            if (std::isnan(report.val_nll[k])) {
                csv << ',';
            } else {
                csv << report.val_nll[k] << ',';
            }
            ++k;
        } else {
            csv << ",,";
        }
        csv << report.grad_norm[epoch] << ',' << report.lr[epoch] << '\n';
    }
}

void write_observables_csv(const std::vector<ObservableResult>& results, const std::string& path,
                           const std::string& config_hash) {
    auto csv = open_out(path);
    csv << "# rbmtomo-observables v1 config=" << config_hash << "\n";
    csv << "name,sites,value,std_error,method,n_samples,seed\n";
    csv.precision(17);
    for (const auto& r : results) {
        csv << r.name << ',';
        for (std::size_t i = 0; i < r.sites.size(); ++i)
            csv << (i ? "|" : "") << r.sites[i];
        csv << ',' << r.value << ',' << r.std_error << ',' << r.method << ',' << r.n_samples
            << ',' << r.seed << '\n';
    }
}

namespace {

std::string checkpoint_tag(std::size_t idx) {
    std::ostringstream tag;
    tag << "ck" << (idx < 10 ? "0" : "") << idx;
    return tag.str();
}

} // namespace

std::vector<CheckpointArtifacts> cmd_generate(const ExperimentConfig& cfg, int threads,
                                              bool quiet) {
    cfg.hamiltonian.validate();
    cfg.sweep.validate();
    const std::string hash = cfg.hash();
    fs::create_directories(cfg.output_dir);

    std::vector<CheckpointArtifacts> artifacts;
    std::vector<QuantumState> states;

    if (cfg.mode == GenerateMode::Lindblad) {
        Eigen::VectorXcd psi0 = Eigen::VectorXcd::Zero(Eigen::Index{1} << cfg.hamiltonian.n_sites);
        psi0(0) = 1.0; // all atoms in |g>
        states = disorder_averaged_evolution(QuantumState::pure(cfg.hamiltonian.n_sites, psi0),
                                             cfg.sweep, cfg.hamiltonian, cfg.lindblad,
                                             cfg.dataset.seed, cfg.lindblad_options, threads);
    } else {
        for (double t : cfg.sweep.checkpoints_us) {
            HamiltonianParams hp = cfg.hamiltonian;
            hp.delta = cfg.sweep.delta_mhz(t);
            states.push_back(ground_state(hp).state);
        }
    }

    for (std::size_t k = 0; k < states.size(); ++k) {
        const double t = cfg.sweep.checkpoints_us[k];
        CheckpointArtifacts art;
        art.t_us = t;
        art.delta_mhz = cfg.sweep.delta_mhz(t);
        art.omega_mhz = cfg.mode == GenerateMode::Lindblad ? cfg.sweep.omega_mhz(t)
                                                           : cfg.hamiltonian.omega;
        const std::string tag = checkpoint_tag(k);
        art.dataset_stem = tag;
        art.state_path = tag + "_state.json";

        Dataset d = sample_measurements(states[k], cfg.dataset.n_samples,
                                        split_seed(cfg.dataset.seed, k),
                                        cfg.mode == GenerateMode::Lindblad ? "lindblad"
                                                                           : "ground_state");
        d.meta.sweep_time_us = t;
        d.meta.config_hash = hash;
        write_dataset(d, (fs::path(cfg.output_dir) / art.dataset_stem).string());
        write_state(states[k], (fs::path(cfg.output_dir) / art.state_path).string(), hash);
        artifacts.push_back(art);
        if (!quiet)
            std::cout << "generated " << tag << "  t=" << art.t_us << " us  delta="
                      << art.delta_mhz << " MHz\n";
    }

    json manifest;
    manifest["schema"] = "rbmtomo-manifest-v1";
    manifest["config_hash"] = hash;
    manifest["config"] = json::parse(cfg.canonical_json());
    json list = json::array();
    for (const auto& art : artifacts)
        list.push_back({{"t_us", art.t_us},
                        {"delta_mhz", art.delta_mhz},
                        {"omega_mhz", art.omega_mhz},
                        {"dataset", art.dataset_stem},
                        {"state", art.state_path}});
    manifest["checkpoints"] = std::move(list);
    open_out((fs::path(cfg.output_dir) / "manifest.json").string()) << manifest.dump(2) << '\n';
    return artifacts;
}

void cmd_corrupt(const ExperimentConfig& cfg, const std::string& in_stem,
                 const std::string& out_stem) {
    require(cfg.noise.has_value(), "corrupt: config has no noise section");
    Dataset d = read_dataset(in_stem);
    check_hash(in_stem, d.meta.config_hash, cfg.hash());
    Dataset noisy = corrupt_dataset(d, *cfg.noise, split_seed(cfg.dataset.seed, 0xC0));
    noisy.meta.config_hash = d.meta.config_hash;
    write_dataset(noisy, out_stem);
}

TrainReport cmd_train(const ExperimentConfig& cfg, const std::string& dataset_stem,
                      const std::string& out_prefix, bool quiet) {
    Dataset d = read_dataset(dataset_stem);
    const std::string hash = cfg.hash();
    check_hash(dataset_stem, d.meta.config_hash, hash);

    TrainConfig tc = cfg.train;
    TrainReport report = train(d, tc);
    report.config_hash = hash;
    write_rbm(report.final_params, out_prefix + "_model.json", hash);
    write_train_report(report, out_prefix + "_train.json", out_prefix + "_curves.csv");
    for (std::size_t s = 0; s < report.snapshots.size(); ++s)
        write_rbm(report.snapshots[s], out_prefix + "_snap" + std::to_string(s) + ".json", hash);
    if (!quiet)
        std::cout << "trained " << dataset_stem << " -> " << out_prefix << "_model.json ("
                  << report.wall_time_s << " s)\n";
    return report;
}

std::vector<ObservableResult> cmd_evaluate(const ExperimentConfig& cfg,
                                           const std::string& model_path,
                                           const std::string& out_csv,
                                           const std::string& fd_dataset_stem, bool quiet) {
    std::string model_hash;
    RbmParams rbm = read_rbm(model_path, &model_hash);
    const std::string hash = cfg.hash();
    check_hash(model_path, model_hash, hash);

    const int n = rbm.n_visible();
    McOptions mc;
    mc.n_mc = cfg.evaluate.n_mc;
    const std::uint64_t seed = cfg.evaluate.seed;
    std::vector<ObservableResult> results;

    for (const std::string& name : cfg.evaluate.observables) {
        if (name == "gzz_avg") {
            for (int s = 1; s <= n - 1; ++s) results.push_back(avg_correlator(rbm, s));
            if (cfg.evaluate.apply_forward_noise && cfg.noise) {
                DiagonalSpec spec;
                spec.kind = DiagonalSpec::Kind::GzzAvg;
                for (int s = 1; s <= n - 1; ++s) {
                    spec.i = s;
                    results.push_back(forward_noise(rbm, *cfg.noise, spec,
                                                    split_seed(seed, 0x100 + s), mc));
                }
            }
        } else if (name == "x_profile") {
            auto profile = transverse_profile(rbm, split_seed(seed, 0x200), mc);
            double mean = 0.0, var = 0.0;
            for (const auto& r : profile) {
                results.push_back(r);
                mean += r.value;
                var += r.std_error * r.std_error;
            }
            ObservableResult xbar;
            xbar.name = "x_mean_avg";
            xbar.value = mean / n;
            xbar.std_error = std::sqrt(var) / n;
            xbar.n_samples = profile.front().n_samples;
            xbar.method = "monte-carlo";
            xbar.seed = profile.front().seed;
            results.push_back(xbar);
        } else if (name == "xx_connected") {
            for (int i = 1; i <= n - 1; ++i)
                results.push_back(xx_connected(rbm, i, split_seed(seed, 0x300 + i), mc));
        } else if (name == "mi") {
            for (int bond : cfg.evaluate.bonds) {
                results.push_back(mutual_information_rbm(rbm, bond, false, seed, mc));
                results.push_back(
                    mutual_information_rbm(rbm, bond, true, split_seed(seed, 0x400 + bond), mc));
            }
        } else if (name == "renyi2") {
            for (int bond : cfg.evaluate.bonds) {
                std::vector<int> region(static_cast<std::size_t>(bond));
                std::iota(region.begin(), region.end(), 1);
                ObservableResult exact;
                exact.name = "renyi2";
                exact.value = renyi2_exact(rbm, region);
                exact.method = "exact";
                exact.sites = {bond};
                results.push_back(exact);
                results.push_back(renyi2_swap(rbm, region, split_seed(seed, 0x500 + bond), mc));
            }
        } else {
            throw ArgumentError("evaluate: unknown observable \"" + name + "\"");
        }
    }

    if (!fd_dataset_stem.empty()) {
        Dataset d = read_dataset(fd_dataset_stem);
        check_hash(fd_dataset_stem, d.meta.config_hash, hash);
        for (int s = 1; s <= n - 1; ++s) {
            ObservableResult r = avg_correlator(d, s);
            r.method = "fd";
            results.push_back(r);
        }
        FdModel fd = build_fd(d);
        ObservableResult size;
        size.name = "model_size_fd";
        size.value = static_cast<double>(model_size(fd));
        size.method = "fd";
        results.push_back(size);
        ObservableResult rbm_size;
        rbm_size.name = "model_size_rbm";
        rbm_size.value = static_cast<double>(model_size(rbm));
        rbm_size.method = "exact";
        results.push_back(rbm_size);
    }

    write_observables_csv(results, out_csv, hash);
    if (!quiet) std::cout << "evaluated " << model_path << " -> " << out_csv << "\n";
    return results;
}

void cmd_sweep(const ExperimentConfig& cfg, int threads, bool quiet) {
    const auto artifacts = cmd_generate(cfg, threads, quiet);
    const fs::path dir(cfg.output_dir);
    for (const auto& art : artifacts) {
        std::string stem = (dir / art.dataset_stem).string();
        if (cfg.noise) {
            const std::string noisy = stem + "_noisy";
            cmd_corrupt(cfg, stem, noisy);
            stem = noisy;
        }
        const std::string prefix = (dir / art.dataset_stem).string();
        cmd_train(cfg, stem, prefix, quiet);
        cmd_evaluate(cfg, prefix + "_model.json", prefix + "_results.csv", stem, quiet);
    }
    cmd_report(cfg.output_dir, quiet);
}

void cmd_report(const std::string& directory, bool quiet) {
    const fs::path dir(directory);
    const json manifest = load_json((dir / "manifest.json").string());
    const std::string hash = manifest.value("config_hash", "");

    auto merged = open_out((dir / "report.csv").string());
    merged << "# rbmtomo-report v1 config=" << hash << "\n";
    merged << "t_us,delta_MHz,observable,sites,value,std_error,method\n";
    merged.precision(17);

    json bundle;
    bundle["schema"] = "rbmtomo-report-v1";
    bundle["config_hash"] = hash;
    json rows = json::array();

    for (std::size_t k = 0; k < manifest.at("checkpoints").size(); ++k) {
        const json& ck = manifest.at("checkpoints")[k];
        const std::string results_path =
            (dir / (ck.at("dataset").get<std::string>() + "_results.csv")).string();
        std::ifstream in(results_path);
        if (!in) continue; // checkpoint not evaluated
        std::string line;
        std::getline(in, line); // provenance comment
        if (line.find(hash) == std::string::npos)
            throw ProvenanceError(results_path + ": config hash does not match manifest");
        std::getline(in, line); // header
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            std::string name, sites, value, se, method, n_samples, seed;
            std::getline(ls, name, ',');
            std::getline(ls, sites, ',');
            std::getline(ls, value, ',');
            std::getline(ls, se, ',');
            std::getline(ls, method, ',');
            std::getline(ls, n_samples, ',');
            std::getline(ls, seed, ',');
            merged << ck.at("t_us").get<double>() << ',' << ck.at("delta_mhz").get<double>()
                   << ',' << name << ',' << sites << ',' << value << ',' << se << ',' << method
                   << '\n';
            rows.push_back({{"t_us", ck.at("t_us")},
                            {"delta_mhz", ck.at("delta_mhz")},
                            {"observable", name},
                            {"sites", sites},
                            {"value", std::stod(value)},
                            {"std_error", std::stod(se)},
                            {"method", method}});
        }
    }
    bundle["rows"] = std::move(rows);
    open_out((dir / "report.json").string()) << bundle.dump(2) << '\n';
    if (!quiet) std::cout << "report written to " << (dir / "report.csv").string() << "\n";
}

} // namespace rbmtomo
