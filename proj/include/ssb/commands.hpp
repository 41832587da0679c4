#pragma once

#include "ssb/config.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ssb {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitBlowUp = 3,
    kExitIo = 4,
};

// Flags shared by every subcommand.
struct GlobalOptions {
    std::optional<double> dt;                        // overrides the config / default time step
    std::optional<std::filesystem::path> output_dir; // overrides output_dir
    bool quiet = false;
};

// Geometry, grid, indicator, phase field and model built from a config.
struct Setup {
    Domain domain;
    Grid2 grid;
    Field2 chi;
    PhaseField pf;
    ReactionModel model;
    double dt;
};
Setup build_setup(const RunConfig& config, std::optional<double> dt_override = std::nullopt);

// Initial fields per the config's initial-condition block.
std::vector<Field2> initial_fields(const RunConfig& config, const Setup& setup);

int cmd_run(const std::filesystem::path& config_path, const GlobalOptions& options);

int cmd_converge(const std::string& preset, const std::vector<double>& xi_list, const std::vector<double>& eta_list,
                 const std::filesystem::path& output, int jobs, double t_final, const GlobalOptions& options);

// Writes chi, phi and |grad log(phi + eps)| without stepping. With
// section_y set, also writes section.csv (x, chi, phi) along the grid row
// nearest to that y.
int cmd_phasefield(const std::filesystem::path& config_path, const std::filesystem::path& output_dir,
                   std::optional<double> section_y, const GlobalOptions& options);

} // namespace ssb
