#include "ssb/phasefield.hpp"
#include "ssb/error.hpp"
#include "ssb/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace ssb {

namespace {

double periodic_offset(int i, int n, double h) { return (i < n / 2 ? i : i - n) * h; }

void require_margin(const Field2& chi, double xi)
{
    const Grid2& g = chi.grid();
    const double margin = kMarginFactor * xi;
    const double tol = 1e-9 * std::max(g.lx(), g.ly());
    for (int j = 0; j < g.ny(); ++j) {
        const double dy = std::min(j * g.dy(), g.ly() - j * g.dy());
        for (int i = 0; i < g.nx(); ++i) {
            if (chi(i, j) == 0.0)
                continue;
            const double dx = std::min(i * g.dx(), g.lx() - i * g.dx());
            if (std::min(dx, dy) < margin - tol) {
                std::ostringstream msg;
                msg << "domain point (" << g.x(i) << ", " << g.y(j) << ") lies within " << std::min(dx, dy)
                    << " of the computational border; the margin must be at least " << margin << " (10 xi)";
                throw MarginError(msg.str());
            }
        }
    }
}

// Periodic 1D samples of exp(-x^2/xi^2) with sum * h == 1. Offsets whose
// weight underflows to zero are dropped.
struct Kernel1 {
    std::vector<int> offset;
    std::vector<double> weight;
};

Kernel1 kernel_1d(int n, double h, double xi)
{
    Kernel1 k;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = periodic_offset(i, n, h);
        const double v = std::exp(-(x * x) / (xi * xi));
        if (v == 0.0)
            continue;
        k.offset.push_back(i < n / 2 ? i : i - n);
        k.weight.push_back(v);
        sum += v;
    }
    for (auto& w : k.weight)
        w /= sum * h;
    return k;
}

// Direct periodic convolution with the separable kernel, x pass then y pass.
// Every term is non-negative, so far-field values keep full relative
// precision instead of carrying FFT round-off of order 1e-16.
Field2 convolve_separable(const Field2& chi, double xi)
{
    const Grid2& g = chi.grid();
    const int nx = g.nx();
    const int ny = g.ny();
    const Kernel1 kx = kernel_1d(nx, g.dx(), xi);
    const Kernel1 ky = kernel_1d(ny, g.dy(), xi);

    Field2 rows(g);
    for (int j = 0; j < ny; ++j) {
        bool any = false;
        for (int i = 0; i < nx && !any; ++i)
            any = chi(i, j) != 0.0;
        if (!any)
            continue;
        for (int i = 0; i < nx; ++i) {
            double acc = 0.0;
            for (std::size_t m = 0; m < kx.offset.size(); ++m) {
                const int q = ((i - kx.offset[m]) % nx + nx) % nx;
                acc += kx.weight[m] * chi(q, j);
            }
            rows(i, j) = acc * g.dx();
        }
    }

    Field2 out(g);
    std::vector<double> column(static_cast<std::size_t>(ny));
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < ny; ++j)
            column[static_cast<std::size_t>(j)] = rows(i, j);
        for (int j = 0; j < ny; ++j) {
            double acc = 0.0;
            for (std::size_t m = 0; m < ky.offset.size(); ++m) {
                const int q = ((j - ky.offset[m]) % ny + ny) % ny;
                acc += ky.weight[m] * column[static_cast<std::size_t>(q)];
            }
            out(i, j) = acc * g.dy();
        }
    }
    return out;
}

} // namespace

Field2 gaussian_kernel(const Grid2& grid, double xi)
{
    if (!(xi > 0.0))
        throw std::invalid_argument("xi must be positive");
    if (xi < 2.0 * std::max(grid.dx(), grid.dy())) {
        std::ostringstream msg;
        msg << "xi = " << xi << " is below 2 dx; the smoothing kernel is under-resolved";
        warn(msg.str());
    }
    Field2 k(grid);
    double sum = 0.0;
    for (int j = 0; j < grid.ny(); ++j) {
        const double y = periodic_offset(j, grid.ny(), grid.dy());
        for (int i = 0; i < grid.nx(); ++i) {
            const double x = periodic_offset(i, grid.nx(), grid.dx());
            const double v = std::exp(-(x * x + y * y) / (xi * xi));
            k(i, j) = v;
            sum += v;
        }
    }
    const double scale = 1.0 / (sum * grid.dx() * grid.dy());
    for (auto& v : k.data())
        v *= scale;
    return k;
}

PhaseField smooth(const Field2& chi, double xi, SpectralEngine& engine)
{
    const Grid2& g = chi.grid();
    require_same_grid(g, engine.grid(), "smooth");
    if (!(xi > 0.0))
        throw std::invalid_argument("xi must be positive");
    for (double v : chi.data())
        if (v != 0.0 && v != 1.0)
            throw std::invalid_argument("indicator field must be binary");
    require_margin(chi, xi);

    if (xi < 2.0 * std::max(g.dx(), g.dy())) {
        std::ostringstream msg;
        msg << "xi = " << xi << " is below 2 dx; the smoothing kernel is under-resolved";
        warn(msg.str());
    }

    Field2 phi = convolve_separable(chi, xi);
    for (auto& v : phi.data())
        v = std::clamp(v, 0.0, 1.0);

    Field2 log_phi(g);
    for (std::size_t k = 0; k < phi.size(); ++k)
        log_phi[k] = std::log(phi[k] + kLogEpsilon);
    auto [gx, gy] = engine.gradient(log_phi);
    return PhaseField{std::move(phi), xi, std::move(gx), std::move(gy)};
}

PhaseField smooth(const Field2& chi, double xi)
{
    SpectralEngine engine(chi.grid());
    return smooth(chi, xi, engine);
}

PhaseField uniform_phase_field(const Grid2& grid, double xi)
{
    return PhaseField{Field2(grid, 1.0), xi, Field2(grid), Field2(grid)};
}

Field2 advective_term(const PhaseField& pf, SpectralEngine& engine, const Field2& u, double diffusivity)
{
    require_same_grid(pf.grid(), u.grid(), "advective_term");
    require_same_grid(pf.grid(), engine.grid(), "advective_term");
    Field2 out(u.grid());
    if (diffusivity == 0.0)
        return out;
    auto [ux, uy] = engine.gradient(u);
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = diffusivity * (pf.glogx[k] * ux[k] + pf.glogy[k] * uy[k]);
    return out;
}

} // namespace ssb
