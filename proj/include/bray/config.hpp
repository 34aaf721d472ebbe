#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bray/fields.hpp"
#include "bray/geometry.hpp"
#include "bray/quadrature.hpp"
#include "bray/recon.hpp"

namespace bray {

// Raw parsed config: sections of key = value lines, with line numbers for
// diagnostics and a consumed set so unknown keys can be rejected after the
// schema walk. Keys may repeat (used by blob lists).
class ConfigTable {
public:
    static ConfigTable parse_file(const std::string& path);
    static ConfigTable parse_text(const std::string& text, const std::string& origin = "<string>");

    // CLI-style override "section.key=value"; replaces existing entries.
    void set(const std::string& dotted_key, const std::string& value);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key, double fallback) const;
    int get_int(const std::string& section, const std::string& key, int fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& section, const std::string& key) const;
    // all values for a repeatable key, in file order
    std::vector<std::string> get_all(const std::string& section, const std::string& key) const;

    // fails with a ConfigError naming every never-consumed key and its line
    void reject_unknown_keys() const;

    const std::string& text() const { return text_; }

    // Sorted section/key=value lines. Output location and seed are left out:
    // they are provenance of a run, not of the experiment, and are reported
    // separately.
    std::string canonical_text() const;

private:
    struct Entry {
        std::string value;
        int line = 0;
        mutable bool consumed = false;
    };
    const Entry* find(const std::string& section, const std::string& key) const;

    std::string origin_;
    std::string text_;
    std::multimap<std::string, Entry> entries_;  // "section/key" -> entry
};

enum class MeasurementSource { Oracle, Simulate, File };

// Everything a run needs, built and validated from a ConfigTable.
struct ExperimentConfig {
    Domain domain{{0, 0, 0}, 1.0};
    ScalarField sigma = ScalarField::constant(0.0);
    ScatteringKernel kernel{ScalarField::constant(0.0), AngularPhase::isotropic()};
    std::optional<ScalarField> sigma_e, sigma_f;

    double line_panel_fraction = 0.01;
    int line_nodes = 4;
    int sphere_nodes = 256;
    bool beam_coarse = false;

    int scan_n = 5;
    double scan_extent = 0.5;
    Direction zeta{1, 0, 0};
    Direction eta{0, 1, 0};

    double epsilon = 0.1;
    MeasurementSource source = MeasurementSource::Oracle;
    std::string measurements_path;
    double gain = 1.0;

    std::vector<double> convergence_epsilons{0.4, 0.2, 0.1, 0.05};

    std::vector<double> stability_deltas{1e-3, 1e-2, 1e-1};
    double stability_gain = 50.0;
    bool stability_baseline = true;
    double noise_delta = 0.0;  // baseline subcommand noise level

    ArtOptions art;
    int art_chords_per_side = 16;
    double art_lateral_extent = 0.8;
    int art_grid = 17;

    double denom_floor = 1e-12;
    double min_chord_fraction = 0.05;
    double max_bad_fraction = 0.5;

    std::string output_dir = "out";
    std::optional<uint64_t> seed;

    std::string config_text;  // raw text after overrides, for the report hash

    LineRule line_rule() const { return {line_panel_fraction * domain.radius(), line_nodes}; }
    CoefficientSet coefficients() const { return {domain, sigma, kernel}; }
    bool has_multifreq() const { return sigma_e.has_value() && sigma_f.has_value(); }
};

ExperimentConfig build_experiment(const ConfigTable& table);

uint64_t fnv1a_hash(const std::string& text);

}  // namespace bray
