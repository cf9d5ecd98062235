#pragma once

// CSV and manifest writers. Numbers are written with std::to_chars (shortest
// round-trip form, independent of the C/C++ locale); missing values are "NA".

#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pairpump/config.hpp"
#include "pairpump/errors.hpp"
#include "pairpump/experiment.hpp"
#include "pairpump/spectrum.hpp"
#include "pairpump/units.hpp"

namespace pairpump {

inline constexpr const char* kToolVersion = "1.0.0";

inline std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw IoError("number formatting failed");
    return std::string(buf, ptr);
}

inline std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }

class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw IoError("cannot open " + path.string() + " for writing");
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << '\n';
        if (!out_) throw IoError("write failed on " + path_.string());
    }

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

/// t_au, N, N_in_el, N_in_po, alpha_el, alpha_po, field_free, then the two
/// boundary densities used by the arrival monitor.
inline void write_time_series(const std::filesystem::path& path, const TimeSeries& series) {
    CsvWriter w(path);
    w.row({"t_au", "N", "N_in_el", "N_in_po", "alpha_el", "alpha_po", "field_free", "edge_density_el_per_au",
           "edge_density_po_per_au"});
    for (const auto& s : series.samples) {
        w.row({format_number(s.t), format_number(s.pairs), format_number(s.in_well_electrons),
               format_number(s.in_well_positrons), format_optional(s.alpha_electrons),
               format_optional(s.alpha_positrons), s.field_free ? "1" : "0", format_number(s.edge_electrons),
               format_number(s.edge_positrons)});
    }
}

/// z_au, N_z_el_per_au, N_z_po_per_au; every `stride`-th grid point.
inline void write_density(const std::filesystem::path& path, const DensitySnapshot& snap, std::size_t stride = 1) {
    CsvWriter w(path);
    w.row({"z_au", "N_z_el_per_au", "N_z_po_per_au"});
    const auto& g = *snap.electrons.grid;
    for (std::size_t j = 0; j < g.size(); j += stride)
        w.row({format_number(g.position(j)), format_number(snap.electrons.values[j]),
               format_number(snap.positrons.values[j])});
}

/// One row per scan value: the parameter, then the eigenvalues inside the
/// window in c^2 units. Rows are padded with empty cells to a common width.
inline void write_spectrum(const std::filesystem::path& path, const SpectrumScan& sc) {
    CsvWriter w(path);
    const bool width = sc.family.parameter == ScanParameter::width;
    std::size_t cols = 0;
    for (const auto& s : sc.samples) cols = std::max(cols, s.eigenvalues.size());
    std::vector<std::string> head{width ? "W_lambdaC" : "V0_c2"};
    for (std::size_t i = 0; i < cols; ++i) head.push_back("E" + std::to_string(i + 1) + "_c2");
    w.row(head);
    for (const auto& s : sc.samples) {
        std::vector<std::string> r{format_number(width ? to_lambda_c(s.value) : to_c2(s.value))};
        for (double e : s.eigenvalues) r.push_back(format_number(to_c2(e)));
        r.resize(cols + 1);
        w.row(r);
    }
}

/// Long-format branch table: branch id, parameter, energy, localization.
inline void write_branches(const std::filesystem::path& path, const SpectrumScan& sc) {
    CsvWriter w(path);
    const bool width = sc.family.parameter == ScanParameter::width;
    w.row({"branch", width ? "W_lambdaC" : "V0_c2", "E_c2", "in_well_probability"});
    for (const auto& s : sc.samples)
        for (const auto& g : s.gap_states)
            w.row({std::to_string(g.branch), format_number(width ? to_lambda_c(s.value) : to_c2(s.value)),
                   format_number(to_c2(g.energy)), format_number(g.localization)});
}

inline void write_diving(const std::filesystem::path& path, const SpectrumScan& sc, const DivingAnalysis& d) {
    CsvWriter w(path);
    const bool width = sc.family.parameter == ScanParameter::width;
    w.row({"branch", width ? "diving_W_lambdaC" : "diving_V0_c2", "residual_c2", "iterations"});
    for (const auto& p : d.points)
        w.row({std::to_string(p.branch), format_number(width ? to_lambda_c(p.value) : to_c2(p.value)),
               format_number(to_c2(p.residual)), std::to_string(p.iterations)});
}

/// upper_bound (lambdaC for width mode, c2 for depth mode), final_N, omega_c2, mode.
inline void write_sweep(const std::filesystem::path& path, const std::vector<SweepPoint>& pts) {
    CsvWriter w(path);
    w.row({"upper_bound", "final_N", "omega_c2", "mode"});
    for (const auto& p : pts) {
        const double ub = p.mode == "depth" ? to_c2(p.upper_bound) : to_lambda_c(p.upper_bound);
        w.row({format_number(ub), format_number(p.final_pairs), format_number(to_c2(p.omega)), p.mode});
    }
}

/// Resolved parameters, outputs and diagnostics of one CLI invocation.
struct RunManifest {
    std::string subcommand;
    ScenarioConfig config;
    nlohmann::json resolved = nlohmann::json::object();
    nlohmann::json diagnostics = nlohmann::json::object();
    std::vector<std::string> outputs;
    double wall_clock_seconds = 0.0;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["tool"] = "pairpump";
        j["version"] = kToolVersion;
        j["subcommand"] = subcommand;
        j["config"] = emit_config(config);
        j["resolved"] = resolved;
        j["diagnostics"] = diagnostics;
        j["outputs"] = outputs;
        j["wall_clock_seconds"] = wall_clock_seconds;
        return j;
    }

    void write(const std::filesystem::path& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw IoError("cannot open " + path.string() + " for writing");
        out << to_json().dump(2) << '\n';
        if (!out) throw IoError("write failed on " + path.string());
    }
};

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace pairpump
