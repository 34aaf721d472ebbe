#include "bray/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "bray/errors.hpp"

namespace bray {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, ',')) out.push_back(trim(cur));
    return out;
}

double parse_double(const std::string& s, const std::string& where) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        fail(ErrorCode::ConfigError, where + ": cannot parse '" + s + "' as a number");
    }
}

}  // namespace

ConfigTable ConfigTable::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_text(ss.str(), path);
}

ConfigTable ConfigTable::parse_text(const std::string& text, const std::string& origin) {
    ConfigTable t;
    t.origin_ = origin;
    t.text_ = text;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                fail(ErrorCode::ConfigError,
                     origin + ":" + std::to_string(lineno) + ": unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty())
                fail(ErrorCode::ConfigError,
                     origin + ":" + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::ConfigError, origin + ":" + std::to_string(lineno) +
                                             ": expected 'key = value', got '" + s + "'");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty())
            fail(ErrorCode::ConfigError, origin + ":" + std::to_string(lineno) + ": empty key");
        if (section.empty())
            fail(ErrorCode::ConfigError,
                 origin + ":" + std::to_string(lineno) + ": key outside any [section]");
        t.entries_.emplace(section + "/" + key, Entry{value, lineno, false});
    }
    return t;
}

void ConfigTable::set(const std::string& dotted_key, const std::string& value) {
    const auto dot = dotted_key.rfind('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == dotted_key.size())
        fail(ErrorCode::ConfigError, "override must look like section.key=value: " + dotted_key);
    const std::string mapkey = dotted_key.substr(0, dot) + "/" + dotted_key.substr(dot + 1);
    entries_.erase(mapkey);
    entries_.emplace(mapkey, Entry{value, 0, false});
    text_ += "\n# override: " + dotted_key + " = " + value;
}

const ConfigTable::Entry* ConfigTable::find(const std::string& section,
                                            const std::string& key) const {
    const auto range = entries_.equal_range(section + "/" + key);
    if (range.first == range.second) return nullptr;
    auto last = range.first;
    for (auto it = range.first; it != range.second; ++it) {
        it->second.consumed = true;
        last = it;
    }
    return &last->second;
}

bool ConfigTable::has(const std::string& section, const std::string& key) const {
    return entries_.count(section + "/" + key) > 0;
}

std::string ConfigTable::get_string(const std::string& section, const std::string& key,
                                    const std::string& fallback) const {
    const Entry* e = find(section, key);
    return e ? e->value : fallback;
}

double ConfigTable::get_double(const std::string& section, const std::string& key,
                               double fallback) const {
    const Entry* e = find(section, key);
    return e ? parse_double(e->value, "[" + section + "] " + key) : fallback;
}

int ConfigTable::get_int(const std::string& section, const std::string& key, int fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    const double v = parse_double(e->value, "[" + section + "] " + key);
    const int i = static_cast<int>(std::lround(v));
    if (std::abs(v - i) > 1e-9)
        fail(ErrorCode::ConfigError, "[" + section + "] " + key + ": expected an integer");
    return i;
}

bool ConfigTable::get_bool(const std::string& section, const std::string& key,
                           bool fallback) const {
    const Entry* e = find(section, key);
    if (!e) return fallback;
    if (e->value == "true" || e->value == "1" || e->value == "yes") return true;
    if (e->value == "false" || e->value == "0" || e->value == "no") return false;
    fail(ErrorCode::ConfigError, "[" + section + "] " + key + ": expected true/false");
}

std::vector<double> ConfigTable::get_doubles(const std::string& section,
                                             const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) return {};
    std::vector<double> out;
    for (const std::string& tok : split_commas(e->value))
        out.push_back(parse_double(tok, "[" + section + "] " + key));
    return out;
}

std::vector<std::string> ConfigTable::get_all(const std::string& section,
                                              const std::string& key) const {
    std::vector<std::string> out;
    const auto range = entries_.equal_range(section + "/" + key);
    for (auto it = range.first; it != range.second; ++it) {
        it->second.consumed = true;
        out.push_back(it->second.value);
    }
    return out;
}

std::string ConfigTable::canonical_text() const {
    std::string out;
    for (const auto& [mapkey, entry] : entries_) {
        if (mapkey == "output/directory" || mapkey == "run/seed") continue;
        out += mapkey + "=" + entry.value + "\n";
    }
    return out;
}

void ConfigTable::reject_unknown_keys() const {
    std::string bad;
    for (const auto& [mapkey, entry] : entries_) {
        if (entry.consumed) continue;
        const auto slash = mapkey.find('/');
        bad += (bad.empty() ? "" : ", ") + ("[" + mapkey.substr(0, slash) + "] " +
                                            mapkey.substr(slash + 1) + " (line " +
                                            std::to_string(entry.line) + ")");
    }
    if (!bad.empty()) fail(ErrorCode::ConfigError, origin_ + ": unknown config keys: " + bad);
}

namespace {

Vec3 parse_vec3(const std::string& s, const std::string& where) {
    const auto toks = split_commas(s);
    if (toks.size() != 3) fail(ErrorCode::ConfigError, where + ": expected three numbers");
    return {parse_double(toks[0], where), parse_double(toks[1], where),
            parse_double(toks[2], where)};
}

ScalarField build_field(const ConfigTable& t, const std::string& section) {
    const std::string kind = t.get_string(section, "kind", "constant");
    if (kind == "constant") {
        return ScalarField::constant(t.get_double(section, "value", 0.0));
    }
    if (kind == "blobs") {
        const double offset = t.get_double(section, "offset", 0.0);
        std::vector<GaussianBlob> blobs;
        for (const std::string& spec : t.get_all(section, "blob")) {
            const auto toks = split_commas(spec);
            if (toks.size() != 5)
                fail(ErrorCode::ConfigError,
                     "[" + section + "] blob: expected cx, cy, cz, width, amplitude");
            blobs.push_back({{parse_double(toks[0], section), parse_double(toks[1], section),
                              parse_double(toks[2], section)},
                             parse_double(toks[3], section), parse_double(toks[4], section)});
        }
        return ScalarField::blobs(std::move(blobs), offset);
    }
    if (kind == "tabulated") {
        const std::string path = t.get_string(section, "file", "");
        if (path.empty())
            fail(ErrorCode::ConfigError, "[" + section + "] tabulated field needs file = <path>");
        std::ifstream in(path);
        if (!in) fail(ErrorCode::IoError, "cannot open field table: " + path);
        TabulatedGrid g;
        in >> g.nx >> g.ny >> g.nz;
        in >> g.lo.x >> g.lo.y >> g.lo.z >> g.hi.x >> g.hi.y >> g.hi.z;
        if (!in) fail(ErrorCode::IoError, "field table header malformed: " + path);
        g.values.assign(static_cast<size_t>(g.nx) * g.ny * g.nz, 0.0);
        for (double& v : g.values)
            if (!(in >> v)) fail(ErrorCode::IoError, "field table truncated: " + path);
        return ScalarField::tabulated(std::move(g));
    }
    fail(ErrorCode::ConfigError, "[" + section + "] unknown field kind '" + kind + "'");
}

Direction parse_direction_angles(const ConfigTable& t, const std::string& key,
                                 const std::string& fallback) {
    const auto toks = split_commas(t.get_string("scan", key, fallback));
    if (toks.size() != 2)
        fail(ErrorCode::ConfigError, "[scan] " + key + ": expected polar, azimuth in degrees");
    const double deg = std::numbers::pi / 180.0;
    const double th = parse_double(toks[0], key) * deg;
    const double ph = parse_double(toks[1], key) * deg;
    return Direction(std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th));
}

}  // namespace

ExperimentConfig build_experiment(const ConfigTable& t) {
    ExperimentConfig e;
    e.domain = Domain(parse_vec3(t.get_string("domain", "center", "0, 0, 0"), "[domain] center"),
                      t.get_double("domain", "radius", 1.0));

    e.sigma = build_field(t, "phantom.sigma");
    ScalarField scatter = build_field(t, "phantom.scatter");
    const std::string angular = t.get_string("phantom.angular", "kind", "isotropic");
    AngularPhase phase = AngularPhase::isotropic();
    if (angular == "henyey-greenstein")
        phase = AngularPhase::henyey_greenstein(t.get_double("phantom.angular", "g", 0.0));
    else if (angular != "isotropic")
        fail(ErrorCode::ConfigError, "[phantom.angular] unknown kind '" + angular + "'");
    e.kernel = ScatteringKernel{std::move(scatter), phase};
    if (t.has("phantom.sigma_e", "kind")) e.sigma_e = build_field(t, "phantom.sigma_e");
    if (t.has("phantom.sigma_f", "kind")) e.sigma_f = build_field(t, "phantom.sigma_f");
    if (e.sigma_e.has_value() != e.sigma_f.has_value())
        fail(ErrorCode::ConfigError,
             "two-frequency phantoms need both [phantom.sigma_e] and [phantom.sigma_f]");

    e.line_panel_fraction = t.get_double("quadrature", "line_panel_fraction", 0.01);
    e.line_nodes = t.get_int("quadrature", "line_nodes", 4);
    e.sphere_nodes = t.get_int("quadrature", "sphere_nodes", 256);
    const std::string preset = t.get_string("quadrature", "beam_preset", "fine");
    if (preset == "coarse")
        e.beam_coarse = true;
    else if (preset != "fine")
        fail(ErrorCode::ConfigError, "[quadrature] beam_preset must be fine or coarse");

    e.scan_n = t.get_int("scan", "grid", 5);
    e.scan_extent = t.get_double("scan", "extent", 0.5);
    e.zeta = parse_direction_angles(t, "zeta", "90, 0");
    e.eta = parse_direction_angles(t, "eta", "90, 90");
    if (e.scan_n < 0) fail(ErrorCode::ConfigError, "[scan] grid must be >= 0");

    e.epsilon = t.get_double("run", "epsilon", 0.1);
    const std::string src = t.get_string("run", "source", "oracle");
    if (src == "oracle")
        e.source = MeasurementSource::Oracle;
    else if (src == "simulate")
        e.source = MeasurementSource::Simulate;
    else if (src == "file")
        e.source = MeasurementSource::File;
    else
        fail(ErrorCode::ConfigError, "[run] source must be oracle, simulate or file");
    e.measurements_path = t.get_string("run", "measurements", "");
    e.gain = t.get_double("run", "gain", 1.0);

    if (t.has("convergence", "epsilons"))
        e.convergence_epsilons = t.get_doubles("convergence", "epsilons");

    if (t.has("stability", "deltas")) e.stability_deltas = t.get_doubles("stability", "deltas");
    e.stability_gain = t.get_double("stability", "gain", 50.0);
    e.stability_baseline = t.get_bool("stability", "baseline", true);
    e.noise_delta = t.get_double("run", "noise_delta", 0.0);

    e.art.iterations = t.get_int("art", "iterations", 50);
    e.art.relaxation = t.get_double("art", "relaxation", 0.5);
    e.art.min_chords = t.get_int("art", "min_chords", 64);
    e.art_chords_per_side = t.get_int("art", "chords_per_side", 16);
    e.art_lateral_extent = t.get_double("art", "lateral_extent", 0.8);
    e.art_grid = t.get_int("art", "grid", 17);

    e.denom_floor = t.get_double("recon", "denom_floor", 1e-12);
    e.min_chord_fraction = t.get_double("recon", "min_chord_fraction", 0.05);
    e.max_bad_fraction = t.get_double("recon", "max_bad_fraction", 0.5);

    e.output_dir = t.get_string("output", "directory", "out");
    if (t.has("run", "seed")) {
        const double s = t.get_double("run", "seed", 0.0);
        if (s < 0) fail(ErrorCode::ConfigError, "[run] seed must be nonnegative");
        e.seed = static_cast<uint64_t>(s);
    }

    t.reject_unknown_keys();
    e.config_text = t.canonical_text();
    return e;
}

uint64_t fnv1a_hash(const std::string& text) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace bray
