// Command-line front end: spectrum | evolve | density | sweep.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pairpump/config.hpp"
#include "pairpump/experiment.hpp"
#include "pairpump/io.hpp"
#include "pairpump/spectrum.hpp"

namespace fs = std::filesystem;
using namespace pairpump;

namespace {

struct CommonArgs {
    std::string config_path;
    int workers = 0;
    double dt = 0.0;
    std::string out_dir;
    bool quiet = false;
};

ScenarioConfig load(const CommonArgs& a) {
    ScenarioConfig c = parse_config(read_text_file(a.config_path));
    if (a.workers > 0) c.workers = a.workers;
    if (a.dt > 0.0) {
        c.dt = a.dt;
        c.steps_per_cycle.reset();
    }
    if (!a.out_dir.empty()) c.output_dir = a.out_dir;
    validate(c);
    std::error_code ec;
    fs::create_directories(c.output_dir, ec);
    if (ec) throw IoError("cannot create output directory " + c.output_dir + ": " + ec.message());
    return c;
}

nlohmann::json resolved_json(const ScenarioConfig& c, const ScenarioResult& r) {
    return {{"n_z", c.n_z},
            {"box_length_au", c.box_length},
            {"dt_au", r.time.dt},
            {"steps_per_cycle", r.time.steps_per_cycle},
            {"total_steps", r.time.total_steps},
            {"t_final_au", r.time.t_final},
            {"negative_modes", r.negative_modes},
            {"positive_modes", r.positive_modes},
            {"workers", c.workers},
            {"in_well_window_au", {r.window.z_min, r.window.z_max}}};
}

RunOptions progress_options(bool quiet) {
    RunOptions o;
    if (!quiet) {
        o.progress = [last = -1](std::size_t s, std::size_t n) mutable {
            const int pct = static_cast<int>(100 * s / n);
            if (pct != last && pct % 5 == 0) {
                std::fprintf(stderr, "\r  step %zu / %zu (%d%%)", s, n, pct);
                if (s == n) std::fputc('\n', stderr);
                last = pct;
            }
        };
    }
    return o;
}

void warn_reflections(const ScenarioConfig& c, double t_final) {
    const double t_edge = c.box_length / (2.0 * kSpeedOfLight);
    if (t_final > t_edge)
        std::fprintf(stderr, "warning: total time %.4g exceeds L/(2c) = %.4g; boundary wrap-around affects late samples\n",
                     t_final, t_edge);
}

nlohmann::json evolve_diagnostics(const ScenarioConfig& c, const ScenarioResult& r) {
    const auto arrival = boundary_monitor(r.series, c.box_length, c.boundary_threshold);
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {{"max_norm_drift", r.max_norm_drift},
            {"final_pairs", r.series.samples.back().pairs},
            {"boundary_arrival_positron_au", opt(arrival.positron)},
            {"boundary_arrival_electron_au", opt(arrival.electron)},
            {"boundary_arrival_estimate_au", arrival.estimate},
            {"pump_beta_electron_au", opt(pump_saturation_beta(r.series, Species::electron))},
            {"pump_beta_positron_au", opt(pump_saturation_beta(r.series, Species::positron))}};
}

int cmd_evolve(const CommonArgs& a, bool with_densities, std::size_t stride) {
    const auto start = std::chrono::steady_clock::now();
    ScenarioConfig c = load(a);
    if (with_densities) {
        c.record_densities = true;
        if (stride > 0) c.density_stride = stride;
    }
    const auto r = run_scenario(c, progress_options(a.quiet));
    warn_reflections(c, r.time.t_final);

    RunManifest m;
    m.subcommand = with_densities ? "density" : "evolve";
    m.config = c;
    const fs::path dir = c.output_dir;
    write_time_series(dir / "timeseries.csv", r.series);
    m.outputs.push_back("timeseries.csv");
    if (c.record_densities) {
        CsvWriter index(dir / "density_index.csv");
        index.row({"index", "t_au", "field_free", "file"});
        for (std::size_t i = 0; i < r.densities.size(); ++i) {
            char name[64];
            std::snprintf(name, sizeof name, "density_%05zu.csv", i);
            write_density(dir / name, r.densities[i], c.density_stride);
            index.row({std::to_string(i), format_number(r.densities[i].t), r.densities[i].field_free ? "1" : "0", name});
            m.outputs.push_back(name);
        }
        m.outputs.push_back("density_index.csv");
    }
    m.resolved = resolved_json(c, r);
    m.diagnostics = evolve_diagnostics(c, r);
    m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    m.outputs.push_back("manifest.json");
    m.write(dir / "manifest.json");
    if (!a.quiet) std::printf("final N = %.6g (t = %.6g a.u.)\n", r.series.samples.back().pairs, r.time.t_final);
    return 0;
}

SpectrumFamily family_from(const ScenarioConfig& c) {
    SpectrumFamily f;
    f.grid = make_grid(c.n_z, c.box_length);
    f.parameter = c.spectrum.parameter;
    f.window = c.spectrum.window;
    f.n_keep = c.spectrum.n_keep;
    std::visit(
        [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, StaticWell>) {
                f.fixed_depth = d.shape.depth;
                f.fixed_width = d.shape.width;
                f.edge = d.shape.edge;
            } else if constexpr (std::is_same_v<T, WidthOscillation>) {
                f.fixed_depth = d.depth;
                f.edge = d.edge;
            } else {
                f.fixed_width = d.width;
                f.edge = d.edge;
            }
        },
        c.drive);
    return f;
}

int cmd_spectrum(const CommonArgs& a) {
    const auto start = std::chrono::steady_clock::now();
    const ScenarioConfig c = load(a);
    if (c.spectrum.points < 2 || !(c.spectrum.to > c.spectrum.from))
        throw ConfigError("spectrum needs points >= 2 and to > from");
    std::vector<double> values(c.spectrum.points);
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = c.spectrum.from + (c.spectrum.to - c.spectrum.from) * static_cast<double>(i) /
                                          static_cast<double>(values.size() - 1);
    const auto family = family_from(c);
    const auto sc = scan(family, values, c.workers);
    const auto dives = diving_points(sc, c.workers);

    const fs::path dir = c.output_dir;
    write_spectrum(dir / "spectrum.csv", sc);
    write_branches(dir / "branches.csv", sc);
    write_diving(dir / "diving.csv", sc, dives);
    RunManifest m;
    m.subcommand = "spectrum";
    m.config = c;
    m.outputs = {"spectrum.csv", "branches.csv", "diving.csv", "manifest.json"};
    m.resolved = {{"n_z", c.n_z}, {"box_length_au", c.box_length}, {"basis_dimension", 2 * family.basis_size()},
                  {"points", values.size()}};
    nlohmann::json issues = nlohmann::json::array();
    for (const auto& is : dives.issues) {
        issues.push_back({{"branch", is.branch}, {"last_value_au", is.last_value}, {"reason", is.reason}});
        std::fprintf(stderr, "warning: branch %d: %s\n", is.branch, is.reason.c_str());
    }
    m.diagnostics = {{"diving_points", dives.points.size()}, {"tracking_issues", issues}};
    m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    m.write(dir / "manifest.json");
    if (!a.quiet) {
        const bool width = c.spectrum.parameter == ScanParameter::width;
        std::printf("diving points (%s):", width ? "lambdaC" : "c2");
        for (const auto& p : dives.points) std::printf(" %.4f", width ? to_lambda_c(p.value) : to_c2(p.value));
        std::printf("\n");
    }
    return 0;
}

int cmd_sweep(const CommonArgs& a) {
    const auto start = std::chrono::steady_clock::now();
    const ScenarioConfig c = load(a);
    if (c.sweep.upper_bounds.empty()) throw ConfigError("sweep needs upper_bounds");
    const auto pts = adiabatic_sweep(c, c.sweep.upper_bounds, c.sweep.parallel_points);
    const fs::path dir = c.output_dir;
    write_sweep(dir / "sweep.csv", pts);
    RunManifest m;
    m.subcommand = "sweep";
    m.config = c;
    m.outputs = {"sweep.csv", "manifest.json"};
    const auto tr = resolve_time(c);
    m.resolved = {{"n_z", c.n_z}, {"box_length_au", c.box_length}, {"dt_au", tr.dt},
                  {"steps_per_cycle", tr.steps_per_cycle}, {"negative_modes", c.negative_count()},
                  {"positive_modes", c.positive_count()}};
    m.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    m.write(dir / "manifest.json");
    if (!a.quiet)
        for (const auto& p : pts) std::printf("%s upper bound %.6g a.u. -> N = %.6g\n", p.mode.c_str(), p.upper_bound, p.final_pairs);
    return 0;
}

int exit_code(ErrorCategory c) {
    switch (c) {
    case ErrorCategory::config: return 2;
    case ErrorCategory::io: return 3;
    case ErrorCategory::numerical: return 4;
    case ErrorCategory::invalid_argument: return 5;
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pair creation from an oscillating 1D well (split-operator Dirac field simulation)"};
    app.require_subcommand(1);
    CommonArgs args;
    std::size_t stride = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", args.config_path, "scenario file")->required();
        sub->add_option("--workers", args.workers, "worker threads (overrides the config)");
        sub->add_option("--dt", args.dt, "time step in a.u. (rounded down to divide the drive period)");
        sub->add_option("--out", args.out_dir, "output directory (overrides the config)");
        sub->add_flag("--quiet", args.quiet, "suppress progress output");
    };
    auto* spectrum = app.add_subcommand("spectrum", "static spectrum scan and diving points");
    auto* evolve = app.add_subcommand("evolve", "time evolution: pair number and pumping diagnostics");
    auto* sweep = app.add_subcommand("sweep", "one-cycle final pair number versus upper turning point");
    auto* density = app.add_subcommand("density", "time evolution with spatial density snapshots");
    for (auto* s : {spectrum, evolve, sweep, density}) add_common(s);
    density->add_option("--stride", stride, "write every n-th grid point");

    CLI11_PARSE(app, argc, argv);
    try {
        if (spectrum->parsed()) return cmd_spectrum(args);
        if (evolve->parsed()) return cmd_evolve(args, false, 0);
        if (density->parsed()) return cmd_evolve(args, true, stride);
        if (sweep->parsed()) return cmd_sweep(args);
    } catch (const Error& e) {
        std::fprintf(stderr, "error[%s]: %s\n", category_name(e.category()), e.what());
        return exit_code(e.category());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error[internal]: %s\n", e.what());
        return 1;
    }
    return 1;
}
