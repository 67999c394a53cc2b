#pragma once

#include "stokes3d/cohomology.hpp"
#include "stokes3d/dynamics.hpp"
#include "stokes3d/geometry.hpp"
#include "stokes3d/lattice.hpp"
#include "stokes3d/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace stokes3d {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kCacheEnv = "STOKES3D_CACHE_DIR";

struct RunConfig {
    LatticeSpec lattice;
    PhysicalParams params;
    std::optional<Vec2> c_star;
    std::vector<Index2> design_targets;
    std::vector<std::string> design_knobs;
    std::optional<Vec2> momentum;
    double tau_res = 1e-9;
    double web_radius = 3.0;
    double eps_valid = 0.1;
    RegimeOptions regime;

    nlohmann::json model; // {"generate": {...}} | {"terms": [...]} | {"file": path}

    int n_starts = 0; // 0 = 10 * #V
    double flow_tol = 1e-7;
    double grad_tol = 1e-12;
    double drift_tol = 1e-6;
    double t_max = 1e7;
    long max_steps = 200000;
    double fixed_dt = 0.0;

    WeightMatrix K1, K2;
    int cup_coef_bound = 2;
    int cup_max_length = 0; // 0 disables the search

    int straighten_samples = 30;

    std::uint64_t seed = 42;
    std::filesystem::path out_dir = "out";
    std::uint64_t budget = kDefaultBudget;

    nlohmann::json source; // parsed config, hashed into the provenance block
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

// Resonant set with the file cache; the cache directory comes from STOKES3D_CACHE_DIR or
// <out>/cache. `hit` reports whether the table was read from the cache.
ResonantSet cached_resonant_set(const RunConfig& cfg, bool* hit = nullptr);

ModelHamiltonian load_model(const Kernel& K, const nlohmann::json& spec, std::uint64_t seed);
ModelHamiltonian parse_model_terms(const Kernel& K, const nlohmann::json& terms);
nlohmann::json model_to_json(const Kernel& K, const ModelHamiltonian& M);

std::string fixed8(double x);
std::string config_hash(const RunConfig& cfg);

// Entry point of the command line tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace stokes3d
