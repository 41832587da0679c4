#include "ssb/grid.hpp"
#include "ssb/error.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ssb {

namespace {
bool g_quiet = false;
}

NonFiniteError::NonFiniteError(std::string substep, std::string component, int i, int j, double t)
    : Error("non-finite value in component '" + component + "' after " + substep + " at grid point (" +
            std::to_string(i) + ", " + std::to_string(j) + "), t = " + std::to_string(t)),
      substep_(std::move(substep)),
      component_(std::move(component)),
      i_(i),
      j_(j),
      t_(t)
{
}

void set_quiet(bool q) { g_quiet = q; }
bool quiet() { return g_quiet; }

void warn(const std::string& message)
{
    if (!g_quiet)
        std::cerr << "warning: " << message << '\n';
}

Grid2::Grid2(int nx, int ny, double lx, double ly, double x0, double y0)
    : nx_(nx), ny_(ny), lx_(lx), ly_(ly), x0_(x0), y0_(y0)
{
    if (nx < 8 || ny < 8)
        throw std::invalid_argument("grid needs at least 8 points per axis");
    if (nx % 2 != 0 || ny % 2 != 0)
        throw std::invalid_argument("grid point counts must be even");
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly))
        throw std::invalid_argument("grid lengths must be positive and finite");
    if (!std::isfinite(x0) || !std::isfinite(y0))
        throw std::invalid_argument("grid origin must be finite");
}

bool Grid2::square_cells() const
{
    return std::abs(dx() - dy()) <= 1e-12 * std::max(dx(), dy());
}

Grid2 make_grid(int nx, int ny, double lx, double ly, double x0, double y0)
{
    return Grid2(nx, ny, lx, ly, x0, y0);
}

std::vector<double> wavenumbers(const Grid2& grid, Axis axis)
{
    const int n = axis == Axis::x ? grid.nx() : grid.ny();
    const double length = axis == Axis::x ? grid.lx() : grid.ly();
    const double k0 = 2.0 * std::numbers::pi / length;
    std::vector<double> k(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        k[static_cast<std::size_t>(j)] = k0 * (j < n / 2 ? j : j - n);
    return k;
}

double eta(const Grid2& grid, double xi)
{
    if (!(xi > 0.0))
        throw std::invalid_argument("xi must be positive");
    if (!grid.square_cells())
        throw std::invalid_argument("eta requires square grid cells");
    return xi / grid.dx();
}

Field2::Field2(const Grid2& grid, double value) : grid_(grid), data_(grid.size(), value)
{
    if (!std::isfinite(value))
        throw std::invalid_argument("field value must be finite");
}

Field2::Field2(const Grid2& grid, std::span<const double> data) : grid_(grid), data_(data.begin(), data.end())
{
    if (data_.size() != grid_.size())
        throw std::invalid_argument("field data length does not match grid size");
    if (!all_finite())
        throw std::invalid_argument("field data contains non-finite values");
}

bool Field2::all_finite() const
{
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Field2::max_abs() const
{
    double m = 0.0;
    for (double v : data_)
        m = std::max(m, std::abs(v));
    return m;
}

void require_same_grid(const Grid2& a, const Grid2& b, const char* what)
{
    if (!(a == b))
        throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

} // namespace ssb
