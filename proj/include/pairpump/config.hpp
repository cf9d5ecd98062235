#pragma once

// Scenario file grammar
// ---------------------
//   # comment (also after values)
//   [section]              optional grouping: grid, drive, run, output, spectrum, sweep
//   key = value [unit]
//
// Dimensioned values carry a unit token:
//   energies / frequencies: c2 | au
//   lengths:                lambdaC | au
//   times:                  au
// Lists (sweep.upper_bounds) are comma separated and share one trailing unit.
// Keys are unique across sections; a key placed under the wrong section is
// rejected. Required: mode plus the drive parameters of that mode
//   width:  omega, W2, V0      (W1 = 0, D = 0.3 lambdaC by default)
//   depth:  omega, V2, W       (V1 = 0)
//   static: V0, W

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pairpump/errors.hpp"
#include "pairpump/experiment.hpp"
#include "pairpump/units.hpp"

namespace pairpump {

namespace config_detail {

enum class Kind { integer, real, boolean, text, energy, length, time, scan_quantity, sweep_list };

struct KeySpec {
    const char* section;
    Kind kind;
};

inline const std::map<std::string, KeySpec>& key_table() {
    static const std::map<std::string, KeySpec> t = {
        {"n_z", {"grid", Kind::integer}},
        {"box_length", {"grid", Kind::length}},
        {"mode", {"drive", Kind::text}},
        {"omega", {"drive", Kind::energy}},
        {"V0", {"drive", Kind::energy}},
        {"V1", {"drive", Kind::energy}},
        {"V2", {"drive", Kind::energy}},
        {"W", {"drive", Kind::length}},
        {"W1", {"drive", Kind::length}},
        {"W2", {"drive", Kind::length}},
        {"D", {"drive", Kind::length}},
        {"cycles", {"run", Kind::integer}},
        {"duration", {"run", Kind::time}},
        {"dt", {"run", Kind::time}},
        {"steps_per_cycle", {"run", Kind::integer}},
        {"n_keep", {"run", Kind::integer}},
        {"positive_keep", {"run", Kind::integer}},
        {"sample_every", {"run", Kind::integer}},
        {"record_densities", {"run", Kind::boolean}},
        {"density_stride", {"run", Kind::integer}},
        {"in_well_half_width", {"run", Kind::length}},
        {"boundary_fraction", {"run", Kind::real}},
        {"boundary_threshold", {"run", Kind::real}},
        {"workers", {"run", Kind::integer}},
        {"dir", {"output", Kind::text}},
        {"parameter", {"spectrum", Kind::text}},
        {"from", {"spectrum", Kind::scan_quantity}},
        {"to", {"spectrum", Kind::scan_quantity}},
        {"points", {"spectrum", Kind::integer}},
        {"window", {"spectrum", Kind::energy}},
        {"basis_keep", {"spectrum", Kind::integer}},
        {"upper_bounds", {"sweep", Kind::sweep_list}},
        {"parallel_points", {"sweep", Kind::boolean}},
    };
    return t;
}

struct Entry {
    std::string value; ///< numeric/text part
    std::string unit;  ///< trailing unit token, may be empty
    int line = 0;
};

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] inline void fail(int line, const std::string& msg) {
    throw ConfigError(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg);
}

inline double parse_number(const std::string& s, int line, const std::string& key) {
    double v = 0.0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) fail(line, "key '" + key + "': '" + s + "' is not a number");
    return v;
}

inline long parse_integer(const Entry& e, const std::string& key) {
    if (!e.unit.empty()) fail(e.line, "key '" + key + "' is dimensionless, unexpected unit '" + e.unit + "'");
    long v = 0;
    auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
    if (ec != std::errc() || ptr != e.value.data() + e.value.size())
        fail(e.line, "key '" + key + "': '" + e.value + "' is not an integer");
    return v;
}

inline double unit_scale(Kind kind, const std::string& unit, int line, const std::string& key) {
    if (unit.empty()) fail(line, "key '" + key + "' needs a unit");
    switch (kind) {
    case Kind::energy:
        if (unit == "c2") return kRestEnergy;
        if (unit == "au") return 1.0;
        fail(line, "key '" + key + "' is an energy: unit must be c2 or au, got '" + unit + "'");
    case Kind::length:
        if (unit == "lambdaC") return kComptonWavelength;
        if (unit == "au") return 1.0;
        fail(line, "key '" + key + "' is a length: unit must be lambdaC or au, got '" + unit + "'");
    case Kind::time:
        if (unit == "au") return 1.0;
        fail(line, "key '" + key + "' is a time: unit must be au, got '" + unit + "'");
    default:
        fail(line, "key '" + key + "' takes no unit");
    }
}

inline double parse_quantity(const Entry& e, Kind kind, const std::string& key) {
    return parse_number(e.value, e.line, key) * unit_scale(kind, e.unit, e.line, key);
}

inline bool parse_bool(const Entry& e, const std::string& key) {
    if (!e.unit.empty()) fail(e.line, "key '" + key + "' is a boolean");
    if (e.value == "true" || e.value == "yes" || e.value == "1") return true;
    if (e.value == "false" || e.value == "no" || e.value == "0") return false;
    fail(e.line, "key '" + key + "': expected true or false, got '" + e.value + "'");
}

/// Shortest decimal in the paper unit that reproduces `v` exactly after
/// conversion; falls back to a.u.
inline std::string format_quantity(double v, double scale, const char* unit) {
    char buf[64];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v / scale);
        if (std::strtod(buf, nullptr) * scale == v) return std::string(buf) + " " + unit;
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf) + " au";
}

inline std::string format_real(double v) {
    char buf[64];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

} // namespace config_detail

/// Parse scenario text into a resolved config (defaults applied, a.u. inside).
inline ScenarioConfig parse_config(std::string_view text) {
    using namespace config_detail;
    std::map<std::string, Entry> entries;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw.substr(0, raw.find('#'));
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(line_no, "malformed section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            static const std::set<std::string> known = {"grid", "drive", "run", "output", "spectrum", "sweep"};
            if (!known.count(section)) fail(line_no, "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string rhs = trim(std::string_view(line).substr(eq + 1));
        const auto it = key_table().find(key);
        if (it == key_table().end()) fail(line_no, "unknown key '" + key + "'");
        if (!section.empty() && section != it->second.section)
            fail(line_no, "key '" + key + "' belongs to section [" + it->second.section + "], not [" + section + "]");
        if (entries.count(key)) fail(line_no, "duplicate key '" + key + "' (first on line " +
                                              std::to_string(entries[key].line) + ")");
        if (rhs.empty()) fail(line_no, "key '" + key + "' has no value");
        Entry e;
        e.line = line_no;
        const Kind kind = it->second.kind;
        if (kind == Kind::text || kind == Kind::boolean || kind == Kind::integer || kind == Kind::real) {
            const auto sp = rhs.find_first_of(" \t");
            e.value = rhs.substr(0, sp);
            if (sp != std::string::npos) e.unit = trim(std::string_view(rhs).substr(sp));
        } else {
            const auto sp = rhs.find_last_of(" \t");
            if (sp == std::string::npos) {
                e.value = rhs;
            } else {
                e.value = trim(std::string_view(rhs).substr(0, sp));
                e.unit = trim(std::string_view(rhs).substr(sp + 1));
            }
        }
        entries[key] = e;
    }

    auto has = [&](const char* k) { return entries.count(k) > 0; };
    if (!has("mode")) {
        fail(0, "missing required keys: mode (width | depth | static); width mode also needs omega, W2, V0; "
                "depth mode needs omega, V2, W; static needs V0, W");
    }
    const Entry& mode_e = entries.at("mode");
    const std::string mode = mode_e.value;
    std::vector<std::string> required;
    if (mode == "width") required = {"omega", "W2", "V0"};
    else if (mode == "depth") required = {"omega", "V2", "W"};
    else if (mode == "static") required = {"V0", "W"};
    else fail(mode_e.line, "mode must be width, depth or static, got '" + mode + "'");
    std::string missing;
    for (const auto& k : required)
        if (!has(k.c_str())) missing += (missing.empty() ? "" : ", ") + k;
    if (!missing.empty()) fail(0, "missing required keys for " + mode + " mode: " + missing);

    auto quantity = [&](const char* k, double fallback) {
        const auto it = entries.find(k);
        return it == entries.end() ? fallback : parse_quantity(it->second, key_table().at(k).kind, k);
    };
    auto integer = [&](const char* k, long fallback) {
        const auto it = entries.find(k);
        return it == entries.end() ? fallback : parse_integer(it->second, k);
    };
    auto nonneg = [&](const char* k, long v) {
        if (v < 0) fail(entries.at(k).line, "key '" + std::string(k) + "' must be non-negative");
        return static_cast<std::size_t>(v);
    };

    // keys that only make sense for one drive mode
    const std::map<std::string, std::set<std::string>> mode_keys = {
        {"width", {"omega", "V0", "W1", "W2", "D"}},
        {"depth", {"omega", "V1", "V2", "W", "D"}},
        {"static", {"V0", "W", "D"}},
    };
    for (const char* k : {"omega", "V0", "V1", "V2", "W", "W1", "W2"})
        if (has(k) && !mode_keys.at(mode).count(k))
            fail(entries.at(k).line, "key '" + std::string(k) + "' does not apply to " + mode + " mode");

    ScenarioConfig c;
    const double edge = quantity("D", 0.3 * kComptonWavelength);
    if (mode == "width") {
        c.drive = WidthOscillation{quantity("V0", 0), quantity("W1", 0), quantity("W2", 0), quantity("omega", 0), edge};
    } else if (mode == "depth") {
        c.drive = DepthOscillation{quantity("W", 0), quantity("V1", 0), quantity("V2", 0), quantity("omega", 0), edge};
    } else {
        c.drive = StaticWell{WellShape{quantity("V0", 0), quantity("W", 0), edge}};
    }
    if (has("n_z")) c.n_z = nonneg("n_z", integer("n_z", 0));
    c.box_length = quantity("box_length", c.box_length);
    if (has("cycles")) {
        const long cy = integer("cycles", 1);
        if (cy < 1) fail(entries.at("cycles").line, "cycles must be a positive integer");
        c.cycles = static_cast<int>(cy);
    }
    c.duration = quantity("duration", 0.0);
    if (has("dt")) c.dt = quantity("dt", 0.0);
    if (has("steps_per_cycle")) c.steps_per_cycle = nonneg("steps_per_cycle", integer("steps_per_cycle", 0));
    if (has("n_keep")) c.n_keep = nonneg("n_keep", integer("n_keep", 0));
    if (has("positive_keep")) c.positive_keep = nonneg("positive_keep", integer("positive_keep", 0));
    if (has("sample_every")) c.sample_every = nonneg("sample_every", integer("sample_every", 0));
    if (has("record_densities")) c.record_densities = parse_bool(entries.at("record_densities"), "record_densities");
    if (has("density_stride")) c.density_stride = nonneg("density_stride", integer("density_stride", 1));
    c.in_well_half_width = quantity("in_well_half_width", c.in_well_half_width);
    if (has("boundary_fraction")) {
        const auto& e = entries.at("boundary_fraction");
        if (!e.unit.empty()) fail(e.line, "key 'boundary_fraction' is dimensionless");
        c.boundary_fraction = parse_number(e.value, e.line, "boundary_fraction");
    }
    if (has("boundary_threshold")) {
        const auto& e = entries.at("boundary_threshold");
        if (!e.unit.empty()) fail(e.line, "key 'boundary_threshold' is in particles per a.u. and takes no unit");
        c.boundary_threshold = parse_number(e.value, e.line, "boundary_threshold");
    }
    if (has("workers")) c.workers = static_cast<int>(integer("workers", 1));
    if (has("dir")) {
        const auto& e = entries.at("dir");
        c.output_dir = e.unit.empty() ? e.value : e.value + " " + e.unit;
    }

    // spectrum
    if (has("parameter")) {
        const auto& e = entries.at("parameter");
        if (e.value == "width") c.spectrum.parameter = ScanParameter::width;
        else if (e.value == "depth") c.spectrum.parameter = ScanParameter::depth;
        else fail(e.line, "parameter must be width or depth, got '" + e.value + "'");
    }
    const Kind scan_kind = c.spectrum.parameter == ScanParameter::width ? Kind::length : Kind::energy;
    if (has("from")) c.spectrum.from = parse_quantity(entries.at("from"), scan_kind, "from");
    if (has("to")) c.spectrum.to = parse_quantity(entries.at("to"), scan_kind, "to");
    if (has("points")) c.spectrum.points = nonneg("points", integer("points", 0));
    c.spectrum.window = quantity("window", c.spectrum.window);
    if (has("basis_keep")) c.spectrum.n_keep = nonneg("basis_keep", integer("basis_keep", 0));

    // sweep
    if (has("upper_bounds")) {
        const auto& e = entries.at("upper_bounds");
        const Kind kind = mode == "depth" ? Kind::energy : Kind::length;
        const double scale = unit_scale(kind, e.unit, e.line, "upper_bounds");
        std::stringstream ss(e.value);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) fail(e.line, "empty entry in upper_bounds");
            c.sweep.upper_bounds.push_back(parse_number(item, e.line, "upper_bounds") * scale);
        }
    }
    if (has("parallel_points")) c.sweep.parallel_points = parse_bool(entries.at("parallel_points"), "parallel_points");

    try {
        validate(c);
    } catch (const ArgumentError& err) {
        fail(0, std::string("invalid configuration: ") + err.what());
    }
    return c;
}

/// Canonical text for a config; parse_config(emit_config(c)) reproduces c.
inline std::string emit_config(const ScenarioConfig& c) {
    using namespace config_detail;
    auto E = [](double v) { return format_quantity(v, kRestEnergy, "c2"); };
    auto Lq = [](double v) { return format_quantity(v, kComptonWavelength, "lambdaC"); };
    auto T = [](double v) { return format_real(v) + " au"; };
    std::ostringstream o;
    o << "[grid]\n";
    o << "n_z = " << c.n_z << "\n";
    o << "box_length = " << format_real(c.box_length) << " au\n";
    o << "\n[drive]\n";
    std::visit(
        [&](const auto& d) {
            using Tp = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<Tp, StaticWell>) {
                o << "mode = static\nV0 = " << E(d.shape.depth) << "\nW = " << Lq(d.shape.width) << "\nD = "
                  << Lq(d.shape.edge) << "\n";
            } else if constexpr (std::is_same_v<Tp, WidthOscillation>) {
                o << "mode = width\nomega = " << E(d.omega) << "\nV0 = " << E(d.depth) << "\nW1 = " << Lq(d.width_min)
                  << "\nW2 = " << Lq(d.width_max) << "\nD = " << Lq(d.edge) << "\n";
            } else {
                o << "mode = depth\nomega = " << E(d.omega) << "\nW = " << Lq(d.width) << "\nV1 = " << E(d.depth_min)
                  << "\nV2 = " << E(d.depth_max) << "\nD = " << Lq(d.edge) << "\n";
            }
        },
        c.drive);
    o << "\n[run]\n";
    o << "cycles = " << c.cycles << "\n";
    if (std::holds_alternative<StaticWell>(c.drive)) o << "duration = " << T(c.duration) << "\n";
    if (c.dt) o << "dt = " << T(*c.dt) << "\n";
    if (c.steps_per_cycle) o << "steps_per_cycle = " << *c.steps_per_cycle << "\n";
    o << "n_keep = " << c.n_keep << "\n";
    o << "positive_keep = " << c.positive_keep << "\n";
    o << "sample_every = " << c.sample_every << "\n";
    o << "record_densities = " << (c.record_densities ? "true" : "false") << "\n";
    o << "density_stride = " << c.density_stride << "\n";
    o << "in_well_half_width = " << Lq(c.in_well_half_width) << "\n";
    o << "boundary_fraction = " << format_real(c.boundary_fraction) << "\n";
    o << "boundary_threshold = " << format_real(c.boundary_threshold) << "\n";
    o << "workers = " << c.workers << "\n";
    o << "\n[output]\ndir = " << c.output_dir << "\n";
    o << "\n[spectrum]\n";
    o << "parameter = " << scan_parameter_name(c.spectrum.parameter) << "\n";
    auto S = [&](double v) { return c.spectrum.parameter == ScanParameter::width ? Lq(v) : E(v); };
    o << "from = " << S(c.spectrum.from) << "\n";
    o << "to = " << S(c.spectrum.to) << "\n";
    o << "points = " << c.spectrum.points << "\n";
    o << "window = " << E(c.spectrum.window) << "\n";
    o << "basis_keep = " << c.spectrum.n_keep << "\n";
    if (!c.sweep.upper_bounds.empty()) {
        // a single trailing unit is shared by the list, so emit in a.u. when
        // any entry does not round-trip in the paper unit
        const bool depth = std::holds_alternative<DepthOscillation>(c.drive);
        const double scale = depth ? kRestEnergy : kComptonWavelength;
        std::string unit = depth ? "c2" : "lambdaC";
        std::vector<std::string> items;
        for (double v : c.sweep.upper_bounds) {
            auto s = format_quantity(v, scale, unit.c_str());
            if (s.size() < 3 || s.substr(s.size() - 3) == " au") { unit = "au"; break; }
            items.push_back(s.substr(0, s.find(' ')));
        }
        if (unit == "au") {
            items.clear();
            for (double v : c.sweep.upper_bounds) items.push_back(format_real(v));
        }
        o << "\n[sweep]\nupper_bounds = ";
        for (std::size_t i = 0; i < items.size(); ++i) o << (i ? ", " : "") << items[i];
        o << " " << unit << "\n";
    } else {
        o << "\n[sweep]\n";
    }
    o << "parallel_points = " << (c.sweep.parallel_points ? "true" : "false") << "\n";
    return o.str();
}

} // namespace pairpump
