#pragma once

#include <string>

#include <json.hpp>

#include "bray/config.hpp"

namespace bray {

inline constexpr const char* kVersion = "0.1.0";

// Pinned measurement CSV layout.
inline constexpr const char* kMeasurementHeader =
    "source_x,source_y,source_z,source_dir_x,source_dir_y,source_dir_z,"
    "detector_x,detector_y,detector_z,detector_dir_x,detector_dir_y,detector_dir_z,"
    "ballistic,single_scatter,tail_bound,epsilon,provenance";

// Runs one subcommand (simulate | reconstruct | reconstruct-mf | convergence |
// stability | baseline), writes its artifacts under cfg.output_dir and returns
// the machine-readable report that was also written there.
nlohmann::ordered_json run_subcommand(const ExperimentConfig& cfg, const std::string& subcommand);

// Least-squares slope of log(y) against log(x); pairs with nonpositive y are
// ignored.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace bray
