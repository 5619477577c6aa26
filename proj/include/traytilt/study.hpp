#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "traytilt/experiment.hpp"

#include <json.hpp>

namespace traytilt {

/// One materialized experiment of a study (a shape x sequence x friction-map
/// combination).
struct StudyVariant {
    std::string label;  // empty for single-variant studies
    ExperimentConfig config;
};

struct Study {
    std::string name;
    std::vector<StudyVariant> variants;
    double convergence_threshold_bits = 0.0;
};

/// Parse and fully materialize a study config. `base_dir` resolves relative
/// shape/sequence/field paths (usually the config file's directory).
///
/// Schema (JSON):
///   name: string
///   tray: {a, b} meters
///   grid: {alpha, beta, gamma}
///   trials: M per variant
///   master_seed: integer
///   tilt_angle_deg: default 30
///   sim: optional SimParams overrides (dt, g, k_wall, c_wall, mu_wall,
///        v_stick, n_support, settle_v, settle_w, settle_hold, max_sim_time)
///   shapes: [ {preset: name} | {path: file} , ... ]
///   sequences: {n, seeds: [...]} | {files: [...]}
///   frictions: {mu0, grid_n, level|amplitude, seeds: [...]} | {files: [...]}
///   convergence_threshold_bits: optional, default 0
/// Variants enumerate shapes x sequences x frictions in that nesting order.
Study study_from_json(const nlohmann::json& j,
                      const std::filesystem::path& base_dir);
Study load_study(const std::filesystem::path& config_path);

/// Resolve a named shape preset: "allen_key_l" or "tri_01".."tri_15".
PartShape shape_preset(const std::string& name);

/// Shipped study templates: recipe_{a,b,c}_{desk,full}. Desk variants run in
/// minutes on a laptop; full variants reproduce the large-scale studies.
nlohmann::json recipe_json(const std::string& name);
std::vector<std::string> recipe_names();

}  // namespace traytilt
