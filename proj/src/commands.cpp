#include "ssb/commands.hpp"

#include "ssb/analysis.hpp"
#include "ssb/error.hpp"
#include "ssb/snapshot.hpp"

#include <fftw3.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#ifndef SSB_VERSION
#define SSB_VERSION "0.0.0"
#endif

namespace ssb {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

template <class F>
int guarded(const char* what, F&& body)
{
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << what << ": config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const MarginError& e) {
        std::cerr << what << ": config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << what << ": config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NonFiniteError& e) {
        std::cerr << what << ": " << e.what() << "\n";
        return kExitBlowUp;
    } catch (const IoError& e) {
        std::cerr << what << ": I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << what << ": I/O error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << what << ": " << e.what() << "\n";
        return kExitFailure;
    }
}

void make_dir(const fs::path& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw IoError("cannot create output directory " + dir.string() + (ec ? ": " + ec.message() : ""));
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::trunc);
    out << text;
    out.flush();
    if (!out)
        throw IoError("cannot write " + path.string());
}

std::string step_tag(long step)
{
    char buf[24];
    std::snprintf(buf, sizeof buf, "%09ld", step);
    return buf;
}

json versions()
{
    json v;
    v["ssb"] = SSB_VERSION;
    v["fftw"] = std::string(fftw_version);
    v["compiler"] = __VERSION__;
    return v;
}

Field2 glog_magnitude(const PhaseField& pf)
{
    Field2 out(pf.grid());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = std::hypot(pf.glogx[k], pf.glogy[k]);
    return out;
}

void write_field(const fs::path& dir, const std::string& stem, const Field2& f, double t, const std::string& name,
                 const OutputSpec& out, json& files)
{
    const fs::path bin = dir / (stem + ".ssbf");
    write_snapshot(bin, f, t, name);
    files.push_back(bin.filename().string());
    if (out.csv) {
        write_csv(dir / (stem + ".csv"), f);
        files.push_back(stem + ".csv");
    }
    if (out.pgm) {
        write_pgm(dir / (stem + ".pgm"), f);
        files.push_back(stem + ".pgm");
    }
}

} // namespace

Setup build_setup(const RunConfig& config, std::optional<double> dt_override)
{
    Domain domain = config.geometry.build();
    const Box box = bounding_box(domain);
    if (!box.finite())
        throw ConfigError("geometry is unbounded (a bare sector needs to be intersected with a bounded shape)");
    const int n = resolved_resolution(config, box);
    Grid2 grid = enlarged_domain(domain, config.xi, n);
    Field2 chi = rasterize(domain, grid);
    PhaseField pf = smooth(chi, config.xi);
    ReactionModel model = config.model.build();
    double dt = dt_override ? *dt_override : config.dt ? *config.dt : default_dt(model, grid);
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ConfigError("time step must be positive");
    return Setup{std::move(domain), grid, std::move(chi), std::move(pf), std::move(model), dt};
}

std::vector<Field2> initial_fields(const RunConfig& config, const Setup& setup)
{
    const auto& names = setup.model.names;
    const Grid2& grid = setup.grid;
    std::vector<Field2> fields(names.size(), Field2(grid));
    const InitialSpec& ini = config.initial;

    if (ini.type == "constant") {
        for (std::size_t c = 0; c < fields.size(); ++c)
            fields[c] = Field2(grid, ini.values.size() == 1 ? ini.values[0] : ini.values[c]);
    } else if (ini.type == "allen_cahn_gaussians") {
        fields[0] = allen_cahn_ic(grid);
    } else if (ini.type == "resting") {
        // Fenton-Karma rest state: u = 0 with both gates open.
        if (setup.model.id == "fenton_karma") {
            fields[1] = Field2(grid, 1.0);
            fields[2] = Field2(grid, 1.0);
        }
    } else if (ini.type == "file") {
        for (const auto& [name, path] : ini.files) {
            Snapshot snap = read_snapshot(path);
            if (!(snap.field.grid() == grid))
                throw ConfigError("initial field " + path.string() + " was written on a different grid");
            fields[setup.model.component_index(name)] = std::move(snap.field);
        }
    }

    for (const auto& st : ini.stimuli) {
        Field2& f = fields[setup.model.component_index(st.component)];
        for (int j = 0; j < grid.ny(); ++j)
            for (int i = 0; i < grid.nx(); ++i) {
                const double x = grid.x(i), y = grid.y(j);
                if (x >= st.region.x_min && x <= st.region.x_max && y >= st.region.y_min && y <= st.region.y_max)
                    f(i, j) = st.value;
            }
    }
    return fields;
}

int cmd_run(const fs::path& config_path, const GlobalOptions& options)
{
    return guarded("run", [&]() -> int {
        const auto started = std::chrono::steady_clock::now();
        RunConfig config = load_config(config_path);
        if (options.output_dir)
            config.output_dir = *options.output_dir;
        Setup setup = build_setup(config, options.dt);
        std::vector<Field2> u0 = initial_fields(config, setup);

        // Resolved config: concrete N and dt, so a re-run needs nothing else.
        RunConfig resolved = config;
        resolved.N = setup.grid.nx();
        resolved.eta.reset();
        resolved.dt = setup.dt;

        const fs::path dir = config.output_dir;
        make_dir(dir);
        write_text(dir / "config.resolved.json", to_json(resolved) + "\n");

        std::vector<std::size_t> selected;
        for (std::size_t c = 0; c < setup.model.names.size(); ++c) {
            const auto& want = config.output.components;
            if (want.empty() || std::find(want.begin(), want.end(), setup.model.names[c]) != want.end())
                selected.push_back(c);
        }

        json files = json::array();
        double last_good_t = 0.0;
        long last_good_step = 0;
        const auto observer = [&](const SolverState& s) {
            for (std::size_t c : selected) {
                const std::string& name = setup.model.names[c];
                write_field(dir, name + "_" + step_tag(s.step_count), s.fields[c], s.t, name, config.output, files);
            }
            last_good_t = s.t;
            last_good_step = s.step_count;
            if (!options.quiet && !quiet())
                std::fprintf(stderr, "t = %.6g (step %ld)\n", s.t, s.step_count);
        };

        SplitStepper stepper(setup.model, setup.pf, setup.dt);
        SolverState state{0.0, std::move(u0), 0};
        json manifest;
        manifest["config"] = json::parse(to_json(resolved));
        manifest["versions"] = versions();
        manifest["grid"] = {{"nx", setup.grid.nx()},   {"ny", setup.grid.ny()}, {"lx", setup.grid.lx()},
                            {"ly", setup.grid.ly()},   {"x0", setup.grid.x0()}, {"y0", setup.grid.y0()},
                            {"eta", eta(setup.grid, config.xi)}};
        manifest["dt"] = setup.dt;

        int status = kExitOk;
        try {
            SolverState final_state = run(stepper, std::move(state), config.t_end, config.snapshot_every, observer,
                                          config.scheme);
            manifest["status"] = "ok";
            manifest["steps"] = final_state.step_count;
            manifest["t_final"] = final_state.t;
        } catch (const NonFiniteError& e) {
            std::cerr << "run: " << e.what() << "\n";
            manifest["status"] = "blow-up";
            manifest["error"] = e.what();
            status = kExitBlowUp;
        }
        manifest["last_good"] = {{"t", last_good_t}, {"step", last_good_step}};
        manifest["files"] = files;
        manifest["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        write_text(dir / "manifest.json", manifest.dump(2) + "\n");
        return status;
    });
}

int cmd_converge(const std::string& preset, const std::vector<double>& xi_list, const std::vector<double>& eta_list,
                 const fs::path& output, int jobs, double t_final, const GlobalOptions& options)
{
    return guarded("converge", [&]() -> int {
        if (!is_heat_preset(preset))
            throw ConfigError("converge needs a heat preset (annulus or quarter_annulus), got '" + preset + "'");
        if (xi_list.empty() || eta_list.empty())
            throw ConfigError("converge needs at least one xi and one eta");
        if (jobs < 1)
            throw ConfigError("--jobs must be at least 1");
        for (double v : xi_list)
            if (!(v > 0.0))
                throw ConfigError("xi values must be positive");
        for (double v : eta_list)
            if (!(v > 0.0))
                throw ConfigError("eta values must be positive");
        if (!(t_final >= 0.0))
            throw ConfigError("t_final must be non-negative");

        SweepOptions opt;
        opt.jobs = jobs;
        opt.dt = options.dt.value_or(0.0);
        opt.t_final = t_final;
        if (!options.quiet)
            opt.progress = [](const SweepRow& r) {
                std::fprintf(stderr, "xi=%g eta=%g N=%d e=%.4g (%.1fs)%s%s\n", r.xi, r.eta, r.N, r.e, r.wall_seconds,
                             r.failure.empty() ? "" : " FAILED: ", r.failure.c_str());
            };
        const auto rows = convergence_sweep(preset, xi_list, eta_list, opt);

        if (output.has_parent_path())
            make_dir(output.parent_path());
        std::ofstream out(output, std::ios::trunc);
        if (!out)
            throw IoError("cannot write " + output.string());
        write_sweep_csv(out, rows);
        out.flush();
        if (!out)
            throw IoError("cannot write " + output.string());

        bool failed = false;
        for (const auto& r : rows)
            if (!r.failure.empty()) {
                failed = true;
                std::cerr << "converge: xi=" << r.xi << " eta=" << r.eta << ": " << r.failure << "\n";
            }
        return failed ? kExitBlowUp : kExitOk;
    });
}

int cmd_phasefield(const fs::path& config_path, const fs::path& output_dir, std::optional<double> section_y,
                   const GlobalOptions& options)
{
    return guarded("phasefield", [&]() -> int {
        RunConfig config = load_config(config_path);
        Setup setup = build_setup(config, options.dt);
        make_dir(output_dir);

        json files = json::array();
        write_field(output_dir, "chi", setup.chi, 0.0, "chi", config.output, files);
        write_field(output_dir, "phi", setup.pf.phi, 0.0, "phi", config.output, files);
        write_field(output_dir, "glog_abs", glog_magnitude(setup.pf), 0.0, "glog_abs", config.output, files);

        if (section_y) {
            const Grid2& g = setup.grid;
            const double rel = (*section_y - g.y0()) / g.dy();
            if (!(rel >= -0.5 && rel < g.ny() - 0.5))
                throw ConfigError("section y lies outside the computational box");
            const int j = static_cast<int>(std::lround(rel));
            std::ofstream out(output_dir / "section.csv", std::ios::trunc);
            char buf[96];
            out << "x,chi,phi\n";
            for (int i = 0; i < g.nx(); ++i) {
                std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", g.x(i), setup.chi(i, j), setup.pf.phi(i, j));
                out << buf;
            }
            out.flush();
            if (!out)
                throw IoError("cannot write section.csv");
            files.push_back("section.csv");
        }

        json manifest;
        manifest["config"] = json::parse(to_json(config));
        manifest["versions"] = versions();
        manifest["grid"] = {{"nx", setup.grid.nx()}, {"ny", setup.grid.ny()}, {"lx", setup.grid.lx()},
                            {"ly", setup.grid.ly()}, {"x0", setup.grid.x0()}, {"y0", setup.grid.y0()},
                            {"eta", eta(setup.grid, config.xi)}};
        manifest["files"] = files;
        write_text(output_dir / "manifest.json", manifest.dump(2) + "\n");
        return kExitOk;
    });
}

} // namespace ssb
