#pragma once

#include "ssb/grid.hpp"

#include <filesystem>
#include <string>

namespace ssb {

inline constexpr const char* kSnapshotMagic = "SSBF1";

// Binary field dump: one ASCII header line
//   SSBF1 nx ny lx ly x0 y0 t name\n
// followed by nx*ny little-endian float64 values, row-major (x fastest).
struct Snapshot {
    Field2 field;
    double t = 0.0;
    std::string name;
};

void write_snapshot(const std::filesystem::path& path, const Field2& field, double t, const std::string& name);
Snapshot read_snapshot(const std::filesystem::path& path);

// Plain text: header "x,y,value", one row per grid point.
void write_csv(const std::filesystem::path& path, const Field2& field);

// 8-bit binary PGM (P5), rows written top (largest y) first. Values are
// mapped linearly from [lo, hi] to [0, 255]; lo == hi picks the field range.
void write_pgm(const std::filesystem::path& path, const Field2& field, double lo = 0.0, double hi = 0.0);

} // namespace ssb
