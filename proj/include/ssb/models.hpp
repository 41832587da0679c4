#pragma once

#include "ssb/grid.hpp"

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace ssb {

// A system du_j/dt = D_j lap u_j + f_j(u_1..u_n, x, y, t) with constant
// scalar diffusivities. `rates` writes all f_j at one point.
struct ReactionModel {
    using RateFn = std::function<void(std::span<const double> u, double x, double y, double t, std::span<double> rate)>;

    std::string id;
    std::vector<std::string> names;
    std::vector<double> diffusivity;
    RateFn rates;
    // Largest time step the reaction terms tolerate; infinity if unrestricted.
    double max_dt = std::numeric_limits<double>::infinity();
    // True when the rates depend on position only (a fixed source term); the
    // stepper then samples them once instead of every substep.
    bool stationary = false;

    std::size_t n_components() const { return names.size(); }
    std::size_t component_index(const std::string& name) const;
    double rate(std::size_t component, std::span<const double> u, double x, double y, double t) const;
};

// du/dt = D lap u - r cos(2 theta), polar coordinates about (cx, cy).
ReactionModel heat_with_source(double diffusivity, double cx = 0.0, double cy = 0.0);

// Source-free diffusion, used by the reference oracles.
ReactionModel pure_diffusion(double diffusivity);

// du/dt = eps^2 lap u + u - u^3
ReactionModel allen_cahn(double eps);

// Sum of four alternating-sign Gaussians exp(-20 |x - x_i|^2).
Field2 allen_cahn_ic(const Grid2& grid);
struct Point2 {
    double x, y;
};
std::vector<Point2> allen_cahn_ic_centers();

// Three-variable Fenton-Karma model. Units: ms, cm, so D = 1 cm^2/s = 0.001 cm^2/ms.
struct FentonKarmaParams {
    double tau_d = 0.25;
    double tau_r = 50.0;
    double tau_si = 45.0;
    double tau_0 = 8.3;
    double tau_v_plus = 3.33;
    double tau_v1_minus = 1000.0;
    double tau_v2_minus = 19.2;
    double tau_w_plus = 667.0;
    double tau_w_minus = 11.0;
    double u_c = 0.13;
    double u_v = 0.055;
    double u_c_si = 0.85;
    double k = 10.0; // tanh steepness; not part of the published parameter set
    double D = 0.001;

    void validate() const;
};

namespace fk {
// Theta(x) = 1 for x >= 0, else 0.
inline double heaviside(double x) { return x >= 0.0 ? 1.0 : 0.0; }
double j_fi(double u, double v, const FentonKarmaParams& p);
double j_so(double u, const FentonKarmaParams& p);
double j_si(double u, double w, const FentonKarmaParams& p);
double tau_v_minus(double u, const FentonKarmaParams& p);

// Display map u -> mV (u * scale + offset).
inline double to_millivolts(double u, double scale = 100.0, double offset = -85.0) { return u * scale + offset; }
} // namespace fk

ReactionModel fenton_karma(const FentonKarmaParams& params);

} // namespace ssb
