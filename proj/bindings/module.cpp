#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rbmtomo/estimators.hpp"
#include "rbmtomo/fd_model.hpp"
#include "rbmtomo/hamiltonian.hpp"
#include "rbmtomo/lindblad.hpp"
#include "rbmtomo/noise.hpp"
#include "rbmtomo/pipeline.hpp"
#include "rbmtomo/state.hpp"
#include "rbmtomo/training.hpp"

namespace py = pybind11;
using namespace rbmtomo;

namespace {

std::vector<std::string> dataset_strings(const Dataset& d) {
    std::vector<std::string> out;
    out.reserve(d.samples.size());
    for (BasisIndex s : d.samples) out.push_back(index_to_string(s, d.meta.n_sites));
    return out;
}

Dataset dataset_from_strings(const std::vector<std::string>& strings) {
    if (strings.empty()) throw ArgumentError("dataset: need at least one sample");
    std::vector<BasisIndex> samples;
    samples.reserve(strings.size());
    for (const auto& s : strings) samples.push_back(string_to_index(s));
    return make_dataset(static_cast<int>(strings.front().size()), std::move(samples), {});
}

py::dict result_dict(const ObservableResult& r) {
    py::dict d;
    d["name"] = r.name;
    d["value"] = r.value;
    d["std_error"] = r.std_error;
    d["n_samples"] = r.n_samples;
    d["method"] = r.method;
    d["sites"] = r.sites;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "RBM reconstruction of positive pure states from bit-string measurements";

    py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
    py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_RuntimeError);

    py::class_<HamiltonianParams>(m, "HamiltonianParams")
        .def(py::init([](int n_sites, double v_nn, double omega, double delta, int cutoff) {
                 HamiltonianParams p{n_sites, v_nn, omega, delta, cutoff};
                 p.validate();
                 return p;
             }),
             py::arg("n_sites"), py::arg("v_nn"), py::arg("omega"), py::arg("delta"),
             py::arg("interaction_cutoff") = -1)
        .def_readwrite("n_sites", &HamiltonianParams::n_sites)
        .def_readwrite("v_nn", &HamiltonianParams::v_nn)
        .def_readwrite("omega", &HamiltonianParams::omega)
        .def_readwrite("delta", &HamiltonianParams::delta)
        .def_readwrite("interaction_cutoff", &HamiltonianParams::interaction_cutoff);

    py::class_<QuantumState>(m, "QuantumState")
        .def_static("pure", &QuantumState::pure, py::arg("n_sites"), py::arg("amplitudes"))
        .def_static("mixed", &QuantumState::mixed, py::arg("n_sites"), py::arg("density"))
        .def_property_readonly("n_sites", &QuantumState::n_sites)
        .def_property_readonly("is_pure", &QuantumState::is_pure)
        .def("amplitudes", &QuantumState::amplitudes)
        .def("density_matrix", &QuantumState::density_matrix)
        .def("probabilities", &QuantumState::probabilities)
        .def("purity", &QuantumState::purity)
        .def("validate", &QuantumState::validate, py::arg("tol") = 1e-10,
             py::arg("eig_tol") = 1e-9);

    m.def("build_hamiltonian", &build_hamiltonian, py::arg("params"),
          py::arg("budget_bytes") = kDefaultMatrixBudgetBytes);
    m.def(
        "ground_state",
        [](const HamiltonianParams& p) {
            const GroundStateResult r = ground_state(p);
            return py::make_tuple(r.state, r.energy, r.gap, r.degenerate);
        },
        py::arg("params"), "returns (state, energy, gap, degenerate)");
    m.def("approx_z2_state", &approx_z2_state);
    m.def("effective_blockade_hamiltonian", &effective_blockade_hamiltonian, py::arg("omega"),
          py::arg("delta"));

    m.def("partial_trace", &partial_trace, py::arg("state"), py::arg("keep"));
    m.def("renyi_entropy", &renyi_entropy, py::arg("state"), py::arg("n") = 2);
    m.def("mutual_information_exact", &mutual_information_exact, py::arg("state"),
          py::arg("cut_bond"), py::arg("n") = 2);
    m.def("fidelity", &fidelity, py::arg("a"), py::arg("b"));
    m.def("subsystem_avg_fidelity", &subsystem_avg_fidelity, py::arg("a"), py::arg("b"),
          py::arg("s"));
    m.def("positive_pure_partner", &positive_pure_partner, py::arg("state"));

    m.def(
        "sample_measurements",
        [](const QuantumState& state, std::int64_t n, std::uint64_t seed) {
            return dataset_strings(sample_measurements(state, n, seed));
        },
        py::arg("state"), py::arg("n_samples"), py::arg("seed"),
        "list of '0'/'1' strings, site 1 first");

    py::class_<SweepProfile>(m, "SweepProfile")
        .def_readwrite("total_time_us", &SweepProfile::total_time_us)
        .def_readwrite("checkpoints_us", &SweepProfile::checkpoints_us)
        .def("omega_at", [](const SweepProfile& s, double t) { return s.omega_mhz(t); })
        .def("delta_at", [](const SweepProfile& s, double t) { return s.delta_mhz(t); });
    m.def("default_sweep", &default_sweep, py::arg("total_time_us") = 3.4,
          py::arg("n_checkpoints") = 15, py::arg("omega_peak_mhz") = 2.0,
          py::arg("delta_start_mhz") = -10.0, py::arg("delta_end_mhz") = 10.0);

    py::class_<LindbladParams>(m, "LindbladParams")
        .def(py::init([](double gamma_rg, double gamma_gg, double doppler_rms_mhz,
                         int n_disorder) {
                 LindbladParams lp{gamma_rg, gamma_gg, doppler_rms_mhz, n_disorder};
                 lp.validate();
                 return lp;
             }),
             py::arg("gamma_rg") = 1.0 / 80.0, py::arg("gamma_gg") = 1.0 / 40.0,
             py::arg("doppler_rms_mhz") = 0.0435, py::arg("n_disorder") = 100);
    m.def(
        "evolve_lindblad",
        [](const QuantumState& initial, const SweepProfile& sweep, const HamiltonianParams& hp,
           const LindbladParams& lp, const Eigen::VectorXd& disorder, double dt_us) {
            LindbladOptions opts;
            opts.dt_us = dt_us;
            return evolve_lindblad(initial, sweep, hp, lp, disorder, opts);
        },
        py::arg("initial"), py::arg("sweep"), py::arg("params"), py::arg("lindblad"),
        py::arg("disorder_mhz"), py::arg("dt_us") = 0.0);
    m.def("disorder_averaged_evolution",
          [](const QuantumState& initial, const SweepProfile& sweep, const HamiltonianParams& hp,
             const LindbladParams& lp, std::uint64_t seed, int threads) {
              return disorder_averaged_evolution(initial, sweep, hp, lp, seed, {}, threads);
          },
          py::arg("initial"), py::arg("sweep"), py::arg("params"), py::arg("lindblad"),
          py::arg("seed"), py::arg("threads") = 1);

    py::class_<RbmParams>(m, "RbmParams")
        .def(py::init([](Eigen::MatrixXd w, Eigen::VectorXd b, Eigen::VectorXd c) {
                 RbmParams rbm{std::move(w), std::move(b), std::move(c)};
                 rbm.validate();
                 return rbm;
             }),
             py::arg("weights"), py::arg("visible_bias"), py::arg("hidden_bias"))
        .def_static("init", &RbmParams::init, py::arg("n_visible"), py::arg("n_hidden"),
                    py::arg("seed"))
        .def_readwrite("weights", &RbmParams::weights)
        .def_readwrite("visible_bias", &RbmParams::visible_bias)
        .def_readwrite("hidden_bias", &RbmParams::hidden_bias)
        .def_property_readonly("n_visible", &RbmParams::n_visible)
        .def_property_readonly("n_hidden", &RbmParams::n_hidden);

    m.def("effective_energy",
          [](const RbmParams& rbm, const std::string& sigma) {
              return effective_energy(rbm, string_to_index(sigma));
          },
          py::arg("rbm"), py::arg("sigma"));
    m.def("log_partition_exact", &log_partition_exact, py::arg("rbm"));
    m.def("probability_exact",
          [](const RbmParams& rbm, const std::string& sigma) {
              return probability_exact(rbm, string_to_index(sigma));
          },
          py::arg("rbm"), py::arg("sigma"));
    m.def("amplitude",
          [](const RbmParams& rbm, const std::string& sigma) {
              return amplitude(rbm, string_to_index(sigma));
          },
          py::arg("rbm"), py::arg("sigma"));
    m.def("probability_table", &probability_table, py::arg("rbm"));
    m.def("conditional_hidden",
          [](const RbmParams& rbm, const std::string& sigma) {
              return conditional_hidden(rbm, string_to_index(sigma));
          },
          py::arg("rbm"), py::arg("sigma"));
    m.def("conditional_visible", &conditional_visible, py::arg("rbm"), py::arg("hidden"));
    m.def(
        "gibbs_sample",
        [](const RbmParams& rbm, int n_chains, int k, std::uint64_t seed) {
            std::vector<std::string> out;
            for (BasisIndex s : gibbs_sample(rbm, n_chains, k, seed))
                out.push_back(index_to_string(s, rbm.n_visible()));
            return out;
        },
        py::arg("rbm"), py::arg("n_chains"), py::arg("k"), py::arg("seed"));

    py::class_<NoiseModel>(m, "NoiseModel")
        .def(py::init([](double p10, double p01) {
                 NoiseModel nm{p10, p01};
                 nm.validate();
                 return nm;
             }),
             py::arg("p10"), py::arg("p01"))
        .def_readonly("p10", &NoiseModel::p10)
        .def_readonly("p01", &NoiseModel::p01);
    m.def("channel_prob",
          [](const std::string& tau, const std::string& sigma, const NoiseModel& nm) {
              if (tau.size() != sigma.size())
                  throw ArgumentError("channel_prob: length mismatch");
              return channel_prob(string_to_index(tau), string_to_index(sigma),
                                  static_cast<int>(tau.size()), nm);
          },
          py::arg("tau"), py::arg("sigma"), py::arg("noise"));
    m.def(
        "corrupt_dataset",
        [](const std::vector<std::string>& samples, const NoiseModel& nm, std::uint64_t seed) {
            return dataset_strings(corrupt_dataset(dataset_from_strings(samples), nm, seed));
        },
        py::arg("samples"), py::arg("noise"), py::arg("seed"));
    m.def("corrupted_distribution_exact", &corrupted_distribution_exact, py::arg("rbm"),
          py::arg("noise"));
    m.def("effective_couplings",
          [](const NoiseModel& nm) {
              const NoiseCouplings c = effective_couplings(nm);
              return py::make_tuple(c.w_tilde, c.b_sigma, c.b_tau);
          },
          py::arg("noise"), "returns (w_tilde, b_sigma, b_tau)");

    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("n_hidden", &TrainConfig::n_hidden)
        .def_readwrite("learning_rate", &TrainConfig::learning_rate)
        .def_readwrite("lr_decay", &TrainConfig::lr_decay)
        .def_readwrite("batch_size", &TrainConfig::batch_size)
        .def_readwrite("cd_steps", &TrainConfig::cd_steps)
        .def_readwrite("epochs", &TrainConfig::epochs)
        .def_readwrite("seed", &TrainConfig::seed)
        .def_readwrite("noise", &TrainConfig::noise)
        .def_readwrite("noise_free_first_epoch", &TrainConfig::noise_free_first_epoch)
        .def_readwrite("validation_split", &TrainConfig::validation_split)
        .def_readwrite("nll_interval", &TrainConfig::nll_interval);

    m.def(
        "train",
        [](const std::vector<std::string>& samples, const TrainConfig& cfg) {
            const TrainReport report = train(dataset_from_strings(samples), cfg);
            py::dict out;
            out["final_params"] = report.final_params;
            out["nll"] = report.nll;
            out["val_nll"] = report.val_nll;
            out["grad_norm"] = report.grad_norm;
            out["wall_time_s"] = report.wall_time_s;
            return out;
        },
        py::arg("samples"), py::arg("config"));
    m.def(
        "nll_exact",
        [](const RbmParams& rbm, const std::vector<std::string>& samples,
           const std::optional<NoiseModel>& nm) {
            return nll_exact(rbm, dataset_from_strings(samples), nm);
        },
        py::arg("rbm"), py::arg("samples"), py::arg("noise") = std::nullopt);

    m.def(
        "avg_correlator",
        [](const RbmParams& rbm, int s) { return result_dict(avg_correlator(rbm, s)); },
        py::arg("rbm"), py::arg("distance"));
    m.def(
        "avg_correlator_dataset",
        [](const std::vector<std::string>& samples, int s) {
            return result_dict(avg_correlator(dataset_from_strings(samples), s));
        },
        py::arg("samples"), py::arg("distance"));
    m.def(
        "transverse_profile",
        [](const RbmParams& rbm, std::int64_t n_mc, std::uint64_t seed) {
            McOptions mc;
            mc.n_mc = n_mc;
            py::list out;
            for (const auto& r : transverse_profile(rbm, seed, mc)) out.append(result_dict(r));
            return out;
        },
        py::arg("rbm"), py::arg("n_mc") = 100000, py::arg("seed") = 1);
    m.def(
        "xx_connected",
        [](const RbmParams& rbm, int i, std::int64_t n_mc, std::uint64_t seed) {
            McOptions mc;
            mc.n_mc = n_mc;
            return result_dict(xx_connected(rbm, i, seed, mc));
        },
        py::arg("rbm"), py::arg("bond"), py::arg("n_mc") = 100000, py::arg("seed") = 1);
    m.def(
        "mutual_information_rbm",
        [](const RbmParams& rbm, int bond, bool use_mc, std::int64_t n_mc, std::uint64_t seed) {
            McOptions mc;
            mc.n_mc = n_mc;
            return result_dict(mutual_information_rbm(rbm, bond, use_mc, seed, mc));
        },
        py::arg("rbm"), py::arg("cut_bond"), py::arg("use_mc") = false,
        py::arg("n_mc") = 100000, py::arg("seed") = 1);
    m.def("renyi2_exact", &renyi2_exact, py::arg("rbm"), py::arg("region"));

    m.def(
        "fd_fidelity",
        [](const std::vector<std::string>& samples, const QuantumState& truth) {
            return fd_state_fidelity(build_fd(dataset_from_strings(samples)), truth);
        },
        py::arg("samples"), py::arg("truth"));
    m.def("fidelity_bound", &fidelity_bound, py::arg("n_samples"), py::arg("h2"));
    m.def("collision_entropy", &collision_entropy, py::arg("p"));
    m.def(
        "fd_model_size",
        [](const std::vector<std::string>& samples) {
            return model_size(build_fd(dataset_from_strings(samples)));
        },
        py::arg("samples"));
    m.def(
        "rbm_model_size", [](const RbmParams& rbm) { return model_size(rbm); }, py::arg("rbm"));
}
