#pragma once

#include "ssb/aligned.hpp"
#include "ssb/grid.hpp"

#include <complex>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace ssb {

// Fourier pseudo-spectral operators on the periodic grid, backed by FFTW
// real-to-complex transforms. Spectral arrays hold ny * (nx/2 + 1) modes,
// row index = y mode, column index = non-negative x mode.
//
// One engine per thread: the transform work buffers are shared by all calls.
class SpectralEngine {
public:
    explicit SpectralEngine(const Grid2& grid);
    ~SpectralEngine();
    SpectralEngine(SpectralEngine&&) noexcept;
    SpectralEngine& operator=(SpectralEngine&&) noexcept;
    SpectralEngine(const SpectralEngine&) = delete;
    SpectralEngine& operator=(const SpectralEngine&) = delete;

    using Spectrum = AlignedVector<std::complex<double>>;

    const Grid2& grid() const { return grid_; }
    std::size_t spectral_size() const { return spectral_size_; }
    int spectral_nx() const { return grid_.nx() / 2 + 1; }

    // Unnormalized forward transform; inverse divides by nx*ny. Buffers
    // must be 64-byte aligned (Field2 and Spectrum storage is).
    void forward(std::span<const double> in, Spectrum& out);
    void inverse(const Spectrum& in, std::span<double> out);
    // Same as inverse but may overwrite `in`, saving a copy.
    void inverse_consume(Spectrum& in, std::span<double> out);

    Field2 derivative(const Field2& f, Axis axis, int order);
    Field2 laplacian(const Field2& f);
    Field2 diffusion_propagator(const Field2& f, double diffusivity, double dt);
    std::pair<Field2, Field2> gradient(const Field2& f);

    // Gradient of a field already in spectral form.
    void gradient_from_spectrum(const Spectrum& spec, std::span<double> gx, std::span<double> gy);

    // exp(-D |k|^2 dt) per mode; cached for repeated (D, dt) pairs.
    std::span<const double> propagator(double diffusivity, double dt);

    // Per-mode tables (x: nx/2+1 entries, y: ny entries). The first-derivative
    // tables have their Nyquist entry zeroed.
    std::span<const double> kx_squared() const { return kx2_; }
    std::span<const double> ky_squared() const { return ky2_; }
    std::span<const double> kx_first() const { return kx1_; }
    std::span<const double> ky_first() const { return ky1_; }

private:
    struct Plans;

    Grid2 grid_;
    std::size_t spectral_size_;
    std::vector<double> kx_, ky_;   // signed wavenumbers, Nyquist = -n/2 * 2pi/L
    std::vector<double> kx1_, ky1_; // first-derivative multipliers (Nyquist zeroed)
    std::vector<double> kx2_, ky2_;
    std::unique_ptr<Plans> plans_;
    Spectrum scratch_;

    struct CachedPropagator {
        double diffusivity;
        double dt;
        std::vector<double> multiplier;
    };
    std::vector<CachedPropagator> cache_;
};

} // namespace ssb
