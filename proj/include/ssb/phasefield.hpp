#pragma once

#include "ssb/grid.hpp"
#include "ssb/spectral.hpp"

#include <limits>

namespace ssb {

// Regularization added to phi before taking its logarithm.
inline constexpr double kLogEpsilon = std::numeric_limits<double>::epsilon();

// Smoothed indicator phi of the domain together with the cached gradient of
// log(phi + eps), the only geometric input the time stepper needs.
struct PhaseField {
    Field2 phi;
    double xi;
    Field2 glogx;
    Field2 glogy;

    const Grid2& grid() const { return phi.grid(); }
};

// Periodic samples of exp(-(x^2 + y^2)/xi^2) centred on index (0,0), scaled
// so that sum * dx * dy == 1.
Field2 gaussian_kernel(const Grid2& grid, double xi);

// phi = chi * G (periodic convolution, evaluated directly with the separable
// kernel), clamped to [0,1]; glog is the spectral gradient of log(phi + eps).
// Throws MarginError if chi has support closer than 10 xi to the box border.
PhaseField smooth(const Field2& chi, double xi, SpectralEngine& engine);
PhaseField smooth(const Field2& chi, double xi);

// Uniform phi == 1 (no embedded boundary): the stepper then solves the plain
// periodic problem.
PhaseField uniform_phase_field(const Grid2& grid, double xi);

// grad log(phi + eps) . D grad u
Field2 advective_term(const PhaseField& pf, SpectralEngine& engine, const Field2& u, double diffusivity);

} // namespace ssb
