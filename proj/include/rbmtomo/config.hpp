#ifndef RBMTOMO_CONFIG_HPP
#define RBMTOMO_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rbmtomo/hamiltonian.hpp"
#include "rbmtomo/lindblad.hpp"
#include "rbmtomo/noise.hpp"
#include "rbmtomo/training.hpp"

namespace rbmtomo {

enum class GenerateMode { GroundState, Lindblad };

struct DatasetConfig {
    std::int64_t n_samples = 3000;
    std::uint64_t seed = 1;
};

struct EvaluateConfig {
    std::vector<std::string> observables = {"gzz_avg", "x_profile", "xx_connected", "mi"};
    std::int64_t n_mc = 100000;
    std::vector<int> bonds = {3};
    std::uint64_t seed = 1;
    bool apply_forward_noise = false;
};

/// Everything a pipeline run needs; parsed from a JSON file with defaults for
/// missing keys. The canonical serialization is hashed (FNV-1a) into every
/// artifact for provenance checks.
struct ExperimentConfig {
    HamiltonianParams hamiltonian{8, 30.0, 2.0, 10.0, -1};
    SweepProfile sweep = default_sweep();
    LindbladParams lindblad{1.0 / 80.0, 1.0 / 40.0, 0.0435, 100};
    LindbladOptions lindblad_options{};
    DatasetConfig dataset{};
    std::optional<NoiseModel> noise;
    TrainConfig train{};
    EvaluateConfig evaluate{};
    GenerateMode mode = GenerateMode::GroundState;
    std::string output_dir = "out";

    std::string canonical_json() const;
    std::string hash() const;
};

ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& json_text, const std::string& origin = "<string>");

std::uint64_t fnv1a64(const std::string& text);
std::string to_hex(std::uint64_t value);

} // namespace rbmtomo

#endif
