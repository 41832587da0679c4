#pragma once

#include "ssb/aligned.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace ssb {

enum class Axis { x, y };

// Uniform periodic grid on the rectangle [x0, x0+lx) x [y0, y0+ly).
// Point (i, j) sits at (x0 + i*dx, y0 + j*dy); index nx wraps to 0.
class Grid2 {
public:
    Grid2(int nx, int ny, double lx, double ly, double x0 = 0.0, double y0 = 0.0);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double lx() const { return lx_; }
    double ly() const { return ly_; }
    double x0() const { return x0_; }
    double y0() const { return y0_; }
    double dx() const { return lx_ / nx_; }
    double dy() const { return ly_ / ny_; }
    std::size_t size() const { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }

    double x(int i) const { return x0_ + i * dx(); }
    double y(int j) const { return y0_ + j * dy(); }

    // Row-major with y as the slow axis.
    std::size_t index(int i, int j) const
    {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
    }

    bool square_cells() const;

    friend bool operator==(const Grid2&, const Grid2&) = default;

private:
    int nx_;
    int ny_;
    double lx_;
    double ly_;
    double x0_;
    double y0_;
};

Grid2 make_grid(int nx, int ny, double lx, double ly, double x0 = 0.0, double y0 = 0.0);

// k_j = 2*pi*m(j)/L with m(j) = j for j < n/2 and j - n otherwise.
std::vector<double> wavenumbers(const Grid2& grid, Axis axis);

// Interface resolution xi/dx. Requires square cells.
double eta(const Grid2& grid, double xi);

// Real scalar field sampled on a Grid2.
class Field2 {
public:
    explicit Field2(const Grid2& grid, double value = 0.0);
    Field2(const Grid2& grid, std::span<const double> data);

    const Grid2& grid() const { return grid_; }
    std::size_t size() const { return data_.size(); }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    double& operator[](std::size_t k) { return data_[k]; }
    double operator[](std::size_t k) const { return data_[k]; }
    double& operator()(int i, int j) { return data_[grid_.index(i, j)]; }
    double operator()(int i, int j) const { return data_[grid_.index(i, j)]; }

    bool all_finite() const;
    double max_abs() const;

private:
    Grid2 grid_;
    AlignedVector<double> data_;
};

template <class Fn>
Field2 sample(const Grid2& grid, Fn&& fn)
{
    Field2 f(grid);
    for (int j = 0; j < grid.ny(); ++j) {
        const double y = grid.y(j);
        for (int i = 0; i < grid.nx(); ++i)
            f(i, j) = fn(grid.x(i), y);
    }
    return f;
}

// Throws std::invalid_argument if the two fields live on different grids.
void require_same_grid(const Grid2& a, const Grid2& b, const char* what);

} // namespace ssb
