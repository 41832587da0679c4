#include "ssb/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <stdexcept>

namespace ssb {

namespace {

// The FFTW planner is not thread-safe; execution on distinct plans is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

constexpr std::size_t kMaxCachedPropagators = 8;

std::complex<double> i_power(int n)
{
    switch (n % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
    }
}

#ifndef NDEBUG
// On the self-conjugate columns (x mode 0 and x Nyquist) of a half-complex
// spectrum the multiplier must map Hermitian data to Hermitian data,
// otherwise c2r silently drops an imaginary part.
void check_hermitian_multiplier(const std::vector<std::complex<double>>& column_mult, int ny)
{
    for (int j = 0; j < ny; ++j) {
        const auto a = column_mult[static_cast<std::size_t>(j)];
        const auto b = std::conj(column_mult[static_cast<std::size_t>((ny - j) % ny)]);
        assert(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)) && "non-Hermitian spectral multiplier");
        (void)a;
        (void)b;
    }
}
#endif

} // namespace

struct SpectralEngine::Plans {
    double* real = nullptr;
    fftw_complex* cplx = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;

    Plans(int nx, int ny)
    {
        const std::size_t n_real = static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
        const std::size_t n_cplx = static_cast<std::size_t>(ny) * static_cast<std::size_t>(nx / 2 + 1);
        std::lock_guard lock(planner_mutex());
        real = fftw_alloc_real(n_real);
        cplx = fftw_alloc_complex(n_cplx);
        // FFTW_ESTIMATE keeps the chosen algorithm, and so the round-off,
        // identical from run to run.
        fwd = fftw_plan_dft_r2c_2d(ny, nx, real, cplx, FFTW_ESTIMATE | FFTW_PRESERVE_INPUT);
        inv = fftw_plan_dft_c2r_2d(ny, nx, cplx, real, FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
        if (!real || !cplx || !fwd || !inv)
            throw std::runtime_error("FFTW plan creation failed");
    }

    ~Plans()
    {
        std::lock_guard lock(planner_mutex());
        if (fwd)
            fftw_destroy_plan(fwd);
        if (inv)
            fftw_destroy_plan(inv);
        fftw_free(real);
        fftw_free(cplx);
    }

    Plans(const Plans&) = delete;
    Plans& operator=(const Plans&) = delete;
};

SpectralEngine::SpectralEngine(const Grid2& grid)
    : grid_(grid),
      spectral_size_(static_cast<std::size_t>(grid.ny()) * static_cast<std::size_t>(grid.nx() / 2 + 1))
{
    const auto kx_full = wavenumbers(grid, Axis::x);
    ky_ = wavenumbers(grid, Axis::y);
    const int hx = grid.nx() / 2 + 1;
    kx_.assign(kx_full.begin(), kx_full.begin() + hx);
    // Column nx/2 of the half spectrum is the Nyquist mode, -nx/2 * 2pi/lx.
    kx_[static_cast<std::size_t>(hx - 1)] = kx_full[static_cast<std::size_t>(grid.nx() / 2)];

    kx1_ = kx_;
    ky1_ = ky_;
    kx1_[static_cast<std::size_t>(hx - 1)] = 0.0;
    ky1_[static_cast<std::size_t>(grid.ny() / 2)] = 0.0;

    kx2_.resize(kx_.size());
    ky2_.resize(ky_.size());
    std::transform(kx_.begin(), kx_.end(), kx2_.begin(), [](double k) { return k * k; });
    std::transform(ky_.begin(), ky_.end(), ky2_.begin(), [](double k) { return k * k; });

#ifndef NDEBUG
    {
        std::vector<std::complex<double>> col(ky1_.size());
        for (std::size_t j = 0; j < ky1_.size(); ++j)
            col[j] = {0.0, ky1_[j]};
        check_hermitian_multiplier(col, grid.ny());
    }
#endif

    plans_ = std::make_unique<Plans>(grid.nx(), grid.ny());
    scratch_.resize(spectral_size_);
}

SpectralEngine::~SpectralEngine() = default;
SpectralEngine::SpectralEngine(SpectralEngine&&) noexcept = default;
SpectralEngine& SpectralEngine::operator=(SpectralEngine&&) noexcept = default;

namespace {

bool aligned_like_fftw(const void* p)
{
    return reinterpret_cast<std::uintptr_t>(p) % 64 == 0;
}

} // namespace

void SpectralEngine::forward(std::span<const double> in, Spectrum& out)
{
    if (in.size() != grid_.size())
        throw std::invalid_argument("forward transform: size mismatch");
    out.resize(spectral_size_);
    auto* dst = reinterpret_cast<fftw_complex*>(out.data());
    if (aligned_like_fftw(in.data())) {
        // r2c with FFTW_PRESERVE_INPUT leaves `in` untouched.
        fftw_execute_dft_r2c(plans_->fwd, const_cast<double*>(in.data()), dst);
    } else {
        std::copy(in.begin(), in.end(), plans_->real);
        fftw_execute_dft_r2c(plans_->fwd, plans_->real, dst);
    }
}

void SpectralEngine::inverse(const Spectrum& in, std::span<double> out)
{
    if (in.size() != spectral_size_ || out.size() != grid_.size())
        throw std::invalid_argument("inverse transform: size mismatch");
    // c2r destroys its input, so transform a copy.
    std::copy(in.begin(), in.end(), reinterpret_cast<std::complex<double>*>(plans_->cplx));
    double* dst = aligned_like_fftw(out.data()) ? out.data() : plans_->real;
    fftw_execute_dft_c2r(plans_->inv, plans_->cplx, dst);
    const double scale = 1.0 / static_cast<double>(grid_.size());
    if (dst == out.data()) {
        for (auto& v : out)
            v *= scale;
    } else {
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] = dst[k] * scale;
    }
}

void SpectralEngine::inverse_consume(Spectrum& in, std::span<double> out)
{
    if (in.size() != spectral_size_ || out.size() != grid_.size())
        throw std::invalid_argument("inverse transform: size mismatch");
    auto* src = reinterpret_cast<fftw_complex*>(in.data());
    if (!aligned_like_fftw(in.data())) {
        std::copy(in.begin(), in.end(), reinterpret_cast<std::complex<double>*>(plans_->cplx));
        src = plans_->cplx;
    }
    double* dst = aligned_like_fftw(out.data()) ? out.data() : plans_->real;
    fftw_execute_dft_c2r(plans_->inv, src, dst);
    const double scale = 1.0 / static_cast<double>(grid_.size());
    if (dst == out.data()) {
        for (auto& v : out)
            v *= scale;
    } else {
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] = dst[k] * scale;
    }
}

Field2 SpectralEngine::derivative(const Field2& f, Axis axis, int order)
{
    require_same_grid(f.grid(), grid_, "derivative");
    if (order < 1)
        throw std::invalid_argument("derivative order must be positive");

    forward(f.data(), scratch_);
    const int hx = spectral_nx();
    const bool odd = order % 2 == 1;
    for (int j = 0; j < grid_.ny(); ++j) {
        for (int c = 0; c < hx; ++c) {
            const auto cu = static_cast<std::size_t>(c);
            const auto ju = static_cast<std::size_t>(j);
            double k = axis == Axis::x ? (odd ? kx1_[cu] : kx_[cu]) : (odd ? ky1_[ju] : ky_[ju]);
            const std::complex<double> mult = i_power(order) * std::pow(k, order);
            scratch_[ju * static_cast<std::size_t>(hx) + cu] *= mult;
        }
    }
    Field2 out(grid_);
    inverse_consume(scratch_, out.data());
    return out;
}

Field2 SpectralEngine::laplacian(const Field2& f)
{
    require_same_grid(f.grid(), grid_, "laplacian");
    forward(f.data(), scratch_);
    const int hx = spectral_nx();
    for (int j = 0; j < grid_.ny(); ++j)
        for (int c = 0; c < hx; ++c) {
            const auto idx = static_cast<std::size_t>(j) * static_cast<std::size_t>(hx) + static_cast<std::size_t>(c);
            scratch_[idx] *= -(kx2_[static_cast<std::size_t>(c)] + ky2_[static_cast<std::size_t>(j)]);
        }
    Field2 out(grid_);
    inverse_consume(scratch_, out.data());
    return out;
}

std::span<const double> SpectralEngine::propagator(double diffusivity, double dt)
{
    if (!(diffusivity >= 0.0) || !(dt >= 0.0))
        throw std::invalid_argument("diffusion propagator needs D >= 0 and dt >= 0");
    for (const auto& c : cache_)
        if (c.diffusivity == diffusivity && c.dt == dt)
            return c.multiplier;

    if (cache_.size() >= kMaxCachedPropagators)
        cache_.erase(cache_.begin());
    CachedPropagator entry{diffusivity, dt, std::vector<double>(spectral_size_)};
    const int hx = spectral_nx();
    for (int j = 0; j < grid_.ny(); ++j)
        for (int c = 0; c < hx; ++c) {
            const double k2 = kx2_[static_cast<std::size_t>(c)] + ky2_[static_cast<std::size_t>(j)];
            entry.multiplier[static_cast<std::size_t>(j) * static_cast<std::size_t>(hx) + static_cast<std::size_t>(c)] =
                std::exp(-diffusivity * k2 * dt);
        }
    cache_.push_back(std::move(entry));
    return cache_.back().multiplier;
}

Field2 SpectralEngine::diffusion_propagator(const Field2& f, double diffusivity, double dt)
{
    require_same_grid(f.grid(), grid_, "diffusion_propagator");
    const auto mult = propagator(diffusivity, dt);
    forward(f.data(), scratch_);
    for (std::size_t k = 0; k < spectral_size_; ++k)
        scratch_[k] *= mult[k];
    Field2 out(grid_);
    inverse_consume(scratch_, out.data());
    return out;
}

void SpectralEngine::gradient_from_spectrum(const Spectrum& spec, std::span<double> gx, std::span<double> gy)
{
    const auto hx = static_cast<std::size_t>(spectral_nx());
    const auto ny = static_cast<std::size_t>(grid_.ny());
    scratch_.resize(spectral_size_);
    // i k (a + i b) = -k b + i k a
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t c = 0; c < hx; ++c) {
            const std::size_t idx = j * hx + c;
            const double k = kx1_[c];
            scratch_[idx] = {-k * spec[idx].imag(), k * spec[idx].real()};
        }
    inverse_consume(scratch_, gx);
    for (std::size_t j = 0; j < ny; ++j) {
        const double k = ky1_[j];
        for (std::size_t c = 0; c < hx; ++c) {
            const std::size_t idx = j * hx + c;
            scratch_[idx] = {-k * spec[idx].imag(), k * spec[idx].real()};
        }
    }
    inverse_consume(scratch_, gy);
}

std::pair<Field2, Field2> SpectralEngine::gradient(const Field2& f)
{
    require_same_grid(f.grid(), grid_, "gradient");
    Spectrum spec;
    forward(f.data(), spec);
    Field2 gx(grid_), gy(grid_);
    gradient_from_spectrum(spec, gx.data(), gy.data());
    return {std::move(gx), std::move(gy)};
}

} // namespace ssb
