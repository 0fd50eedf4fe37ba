#include "rbmtomo/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace rbmtomo {

using nlohmann::json;

namespace {

// Pull a key with a default, recording a readable path on type errors.
template <typename T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& section) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ArgumentError("config: bad value for " + section + "." + key + ": " + e.what());
    }
}

PiecewiseLinear parse_profile(const json& j, const std::string& key,
                              const PiecewiseLinear& fallback) {
    if (!j.contains(key)) return fallback;
    PiecewiseLinear out;
    for (const auto& pt : j.at(key)) {
        if (!pt.is_array() || pt.size() != 2)
            throw ArgumentError("config: " + key + " must be a list of [t, value] pairs");
        out.points.emplace_back(pt[0].get<double>(), pt[1].get<double>());
    }
    return out;
}

json profile_json(const PiecewiseLinear& p) {
    json out = json::array();
    for (const auto& [t, v] : p.points) out.push_back({t, v});
    return out;
}

} // namespace

ExperimentConfig parse_config(const std::string& json_text, const std::string& origin) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ArgumentError("config: parse error in " + origin + ": " + e.what());
    }

    ExperimentConfig cfg;

    if (j.contains("hamiltonian")) {
        const json& h = j.at("hamiltonian");
        cfg.hamiltonian.n_sites = get_or(h, "n_sites", cfg.hamiltonian.n_sites, "hamiltonian");
        cfg.hamiltonian.v_nn = get_or(h, "v_nn_mhz", cfg.hamiltonian.v_nn, "hamiltonian");
        cfg.hamiltonian.omega = get_or(h, "omega_mhz", cfg.hamiltonian.omega, "hamiltonian");
        cfg.hamiltonian.delta = get_or(h, "delta_mhz", cfg.hamiltonian.delta, "hamiltonian");
        cfg.hamiltonian.interaction_cutoff =
            get_or(h, "interaction_cutoff", cfg.hamiltonian.interaction_cutoff, "hamiltonian");
    }

    if (j.contains("sweep")) {
        const json& s = j.at("sweep");
        const double t_total = get_or(s, "total_time_us", 3.4, "sweep");
        const int n_cp = get_or(s, "n_checkpoints", 15, "sweep");
        cfg.sweep = default_sweep(t_total, n_cp,
                                  get_or(s, "omega_peak_mhz", 2.0, "sweep"),
                                  get_or(s, "delta_start_mhz", -10.0, "sweep"),
                                  get_or(s, "delta_end_mhz", 10.0, "sweep"));
        cfg.sweep.omega_mhz = parse_profile(s, "omega_mhz_points", cfg.sweep.omega_mhz);
        cfg.sweep.delta_mhz = parse_profile(s, "delta_mhz_points", cfg.sweep.delta_mhz);
        if (s.contains("checkpoints_us"))
            cfg.sweep.checkpoints_us = s.at("checkpoints_us").get<std::vector<double>>();
        cfg.sweep.validate();
    }

    if (j.contains("lindblad")) {
        const json& l = j.at("lindblad");
        cfg.lindblad.gamma_rg = get_or(l, "gamma_rg_per_us", cfg.lindblad.gamma_rg, "lindblad");
        cfg.lindblad.gamma_gg = get_or(l, "gamma_gg_per_us", cfg.lindblad.gamma_gg, "lindblad");
        cfg.lindblad.doppler_rms_mhz =
            get_or(l, "doppler_rms_mhz", cfg.lindblad.doppler_rms_mhz, "lindblad");
        cfg.lindblad.n_disorder = get_or(l, "n_disorder", cfg.lindblad.n_disorder, "lindblad");
        cfg.lindblad_options.dt_us = get_or(l, "dt_us", 0.0, "lindblad");
        cfg.lindblad_options.angular_factor =
            get_or(l, "angular_factor", kTwoPi, "lindblad");
    }

    if (j.contains("dataset")) {
        const json& d = j.at("dataset");
        cfg.dataset.n_samples = get_or<std::int64_t>(d, "n_samples", cfg.dataset.n_samples, "dataset");
        cfg.dataset.seed = get_or<std::uint64_t>(d, "seed", cfg.dataset.seed, "dataset");
    }

    if (j.contains("noise") && !j.at("noise").is_null()) {
        const json& n = j.at("noise");
        NoiseModel nm;
        nm.p10 = get_or(n, "p10", 0.01, "noise");
        nm.p01 = get_or(n, "p01", 0.04, "noise");
        nm.validate();
        cfg.noise = nm;
    }

    if (j.contains("train")) {
        const json& t = j.at("train");
        cfg.train.n_hidden = get_or(t, "n_hidden", cfg.train.n_hidden, "train");
        cfg.train.learning_rate = get_or(t, "learning_rate", cfg.train.learning_rate, "train");
        cfg.train.lr_decay = get_or(t, "lr_decay", cfg.train.lr_decay, "train");
        cfg.train.batch_size = get_or(t, "batch_size", cfg.train.batch_size, "train");
        cfg.train.cd_steps = get_or(t, "cd_steps", cfg.train.cd_steps, "train");
        cfg.train.epochs = get_or(t, "epochs", cfg.train.epochs, "train");
        cfg.train.seed = get_or<std::uint64_t>(t, "seed", cfg.train.seed, "train");
        cfg.train.noise_free_first_epoch =
            get_or(t, "noise_free_first_epoch", cfg.train.noise_free_first_epoch, "train");
        cfg.train.validation_split =
            get_or(t, "validation_split", cfg.train.validation_split, "train");
        cfg.train.nll_interval = get_or(t, "nll_interval", cfg.train.nll_interval, "train");
        cfg.train.snapshot_count = get_or(t, "snapshot_count", cfg.train.snapshot_count, "train");
        cfg.train.validate();
    }
    cfg.train.noise = cfg.noise;

    if (j.contains("evaluate")) {
        const json& e = j.at("evaluate");
        cfg.evaluate.observables =
            get_or(e, "observables", cfg.evaluate.observables, "evaluate");
        cfg.evaluate.n_mc = get_or<std::int64_t>(e, "n_mc", cfg.evaluate.n_mc, "evaluate");
        cfg.evaluate.bonds = get_or(e, "bonds", cfg.evaluate.bonds, "evaluate");
        cfg.evaluate.seed = get_or<std::uint64_t>(e, "seed", cfg.evaluate.seed, "evaluate");
        cfg.evaluate.apply_forward_noise =
            get_or(e, "apply_forward_noise", cfg.evaluate.apply_forward_noise, "evaluate");
    }

    const std::string mode = get_or<std::string>(j, "mode", "ground_state", "<root>");
    if (mode == "ground_state") {
        cfg.mode = GenerateMode::GroundState;
    } else if (mode == "lindblad") {
        cfg.mode = GenerateMode::Lindblad;
    } else {
        throw ArgumentError("config: mode must be \"ground_state\" or \"lindblad\", got \"" +
                            mode + "\"");
    }
    cfg.output_dir = get_or<std::string>(j, "output_dir", cfg.output_dir, "<root>");

    cfg.hamiltonian.validate();
    cfg.lindblad.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("config: cannot open " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path);
}

std::string ExperimentConfig::canonical_json() const {
    json j;
    j["hamiltonian"] = {{"n_sites", hamiltonian.n_sites},
                        {"v_nn_mhz", hamiltonian.v_nn},
                        {"omega_mhz", hamiltonian.omega},
                        {"delta_mhz", hamiltonian.delta},
                        {"interaction_cutoff", hamiltonian.interaction_cutoff}};
    j["sweep"] = {{"total_time_us", sweep.total_time_us},
                  {"omega_mhz_points", profile_json(sweep.omega_mhz)},
                  {"delta_mhz_points", profile_json(sweep.delta_mhz)},
                  {"checkpoints_us", sweep.checkpoints_us}};
    j["lindblad"] = {{"gamma_rg_per_us", lindblad.gamma_rg},
                     {"gamma_gg_per_us", lindblad.gamma_gg},
                     {"doppler_rms_mhz", lindblad.doppler_rms_mhz},
                     {"n_disorder", lindblad.n_disorder},
                     {"dt_us", lindblad_options.dt_us},
                     {"angular_factor", lindblad_options.angular_factor}};
    j["dataset"] = {{"n_samples", dataset.n_samples}, {"seed", dataset.seed}};
    if (noise) {
        j["noise"] = {{"p10", noise->p10}, {"p01", noise->p01}};
    } else {
        j["noise"] = nullptr;
    }
    j["train"] = {{"n_hidden", train.n_hidden},
                  {"learning_rate", train.learning_rate},
                  {"lr_decay", train.lr_decay},
                  {"batch_size", train.batch_size},
                  {"cd_steps", train.cd_steps},
                  {"epochs", train.epochs},
                  {"seed", train.seed},
                  {"noise_free_first_epoch", train.noise_free_first_epoch},
                  {"validation_split", train.validation_split},
                  {"nll_interval", train.nll_interval},
                  {"snapshot_count", train.snapshot_count}};
    j["evaluate"] = {{"observables", evaluate.observables},
                     {"n_mc", evaluate.n_mc},
                     {"bonds", evaluate.bonds},
                     {"seed", evaluate.seed},
                     {"apply_forward_noise", evaluate.apply_forward_noise}};
    j["mode"] = mode == GenerateMode::GroundState ? "ground_state" : "lindblad";
    // output_dir intentionally left out: the hash identifies the experiment,
    // not where its artifacts land
    return j.dump(); // nlohmann emits object keys sorted, so this is canonical
}

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string to_hex(std::uint64_t value) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return out;
}

std::string ExperimentConfig::hash() const { return to_hex(fnv1a64(canonical_json())); }

} // namespace rbmtomo
