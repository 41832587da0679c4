#pragma once

#include "ssb/geometry.hpp"
#include "ssb/models.hpp"
#include "ssb/stepper.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ssb {

struct GeometrySpec {
    // Exactly one of: a named preset, a CSG tree (kept as JSON text for the
    // manifest), or a PGM mask.
    std::string preset;
    std::string shape_json;
    std::filesystem::path mask_path;
    double mask_origin_x = 0.0;
    double mask_origin_y = 0.0;
    double mask_pixel_size = 0.0;

    Domain build() const;
};

struct ModelSpec {
    std::string type; // heat | allen_cahn | fenton_karma
    double D = 1.0;   // heat
    double cx = 0.0, cy = 0.0;
    double eps = 0.01; // allen_cahn
    FentonKarmaParams fk;

    ReactionModel build() const;
};

struct StimulusSpec {
    Box region;
    double value = 1.0;
    std::string component = "u";
};

struct InitialSpec {
    std::string type = "zero"; // zero | constant | allen_cahn_gaussians | resting | file
    std::vector<double> values;                        // constant: one per component (or one for all)
    std::vector<StimulusSpec> stimuli;                 // applied on top of any type
    std::map<std::string, std::filesystem::path> files; // file: component -> snapshot
};

struct OutputSpec {
    bool csv = false;
    bool pgm = true;
    std::vector<std::string> components; // empty: all
};

struct RunConfig {
    GeometrySpec geometry;
    double xi = 0.0;
    std::optional<int> N;
    std::optional<double> eta;
    ModelSpec model;
    std::optional<double> dt;
    double t_end = 0.0;
    int snapshot_every = 1;
    std::filesystem::path output_dir = "output";
    InitialSpec initial;
    OutputSpec output;
    Scheme scheme = Scheme::strang;
};

// Strict parsing: unknown keys, wrong types, both or neither of N/eta, and
// missing referenced files all raise ConfigError. Relative paths are resolved
// against `base_dir`.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path);

// Serializes a config in the same grammar (round-trips through parse_config).
std::string to_json(const RunConfig& config, int indent = 2);

// Grid resolution implied by N or eta for the configured geometry.
int resolved_resolution(const RunConfig& config, const Box& box);

} // namespace ssb
