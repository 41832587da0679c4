#include "ssb/commands.hpp"
#include "ssb/error.hpp"

#include <CLI11.hpp>

#include <optional>
#include <string>
#include <vector>

int main(int argc, char** argv)
{
    CLI::App app{"Smoothed spectral boundary solver for reaction-diffusion problems on irregular domains"};
    app.require_subcommand(1);

    std::optional<double> dt;
    std::optional<std::string> out_dir;
    bool quiet = false;
    app.add_option("--dt", dt, "Time step (overrides config and defaults)")->check(CLI::PositiveNumber);
    app.add_option("--seed-output-dir", out_dir, "Output directory (overrides the config's output_dir)");
    app.add_flag("-q,--quiet", quiet, "Suppress progress and warnings");

    std::string run_config;
    auto* run = app.add_subcommand("run", "Run a simulation described by a config file");
    run->add_option("config", run_config, "Config file (JSON)")->required();

    std::string preset;
    std::vector<double> xi_list, eta_list;
    std::string table = "convergence.csv";
    int jobs = 1;
    double t_final = 6.0;
    auto* conv = app.add_subcommand("converge", "Heat-equation error sweep over xi and eta");
    conv->add_option("preset", preset, "annulus or quarter_annulus")->required();
    conv->add_option("--xi", xi_list, "Interface widths")->required()->expected(1, -1);
    conv->add_option("--eta", eta_list, "Interface resolutions xi/dx")->required()->expected(1, -1);
    conv->add_option("-o,--output", table, "CSV output path");
    conv->add_option("-j,--jobs", jobs, "Parallel sweep cells");
    conv->add_option("--t-final", t_final, "Final time of each run");

    std::string pf_config;
    std::string pf_out = "phasefield";
    std::optional<double> section_y;
    auto* pf = app.add_subcommand("phasefield", "Write chi, phi and |grad log(phi + eps)| for a config's geometry");
    pf->add_option("config", pf_config, "Config file (JSON)")->required();
    pf->add_option("-o,--output", pf_out, "Output directory");
    pf->add_option("--section-y", section_y, "Also write an (x, chi, phi) section along this y");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return ssb::kExitConfig;
    }

    ssb::set_quiet(quiet);
    ssb::GlobalOptions options;
    options.dt = dt;
    if (out_dir)
        options.output_dir = *out_dir;
    options.quiet = quiet;

    if (*run)
        return ssb::cmd_run(run_config, options);
    if (*conv)
        return ssb::cmd_converge(preset, xi_list, eta_list, table, jobs, t_final, options);
    const std::string pf_dir = pf->count("--output") || !out_dir ? pf_out : *out_dir;
    return ssb::cmd_phasefield(pf_config, pf_dir, section_y, options);
}
