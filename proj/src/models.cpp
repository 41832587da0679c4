#include "ssb/models.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ssb {

std::size_t ReactionModel::component_index(const std::string& name) const
{
    for (std::size_t j = 0; j < names.size(); ++j)
        if (names[j] == name)
            return j;
    throw std::invalid_argument("model '" + id + "' has no component named '" + name + "'");
}

double ReactionModel::rate(std::size_t component, std::span<const double> u, double x, double y, double t) const
{
    if (component >= n_components() || u.size() != n_components())
        throw std::invalid_argument("rate: component index or state size out of range");
    std::vector<double> out(n_components());
    rates(u, x, y, t, out);
    return out[component];
}

ReactionModel heat_with_source(double diffusivity, double cx, double cy)
{
    if (!(diffusivity > 0.0))
        throw std::invalid_argument("heat model needs D > 0");
    ReactionModel m;
    m.id = "heat";
    m.names = {"u"};
    m.diffusivity = {diffusivity};
    // r cos(2 theta) = (dx^2 - dy^2) / r
    m.rates = [cx, cy](std::span<const double>, double x, double y, double, std::span<double> rate) {
        const double dx = x - cx, dy = y - cy;
        const double r = std::sqrt(dx * dx + dy * dy);
        rate[0] = r > 0.0 ? -(dx * dx - dy * dy) / r : 0.0;
    };
    m.stationary = true;
    return m;
}

ReactionModel pure_diffusion(double diffusivity)
{
    if (!(diffusivity >= 0.0))
        throw std::invalid_argument("diffusivity must be non-negative");
    ReactionModel m;
    m.id = "diffusion";
    m.names = {"u"};
    m.diffusivity = {diffusivity};
    m.rates = [](std::span<const double>, double, double, double, std::span<double> rate) { rate[0] = 0.0; };
    m.stationary = true;
    return m;
}

ReactionModel allen_cahn(double eps)
{
    if (!(eps > 0.0))
        throw std::invalid_argument("Allen-Cahn needs eps > 0");
    ReactionModel m;
    m.id = "allen_cahn";
    m.names = {"u"};
    m.diffusivity = {eps * eps};
    m.rates = [](std::span<const double> u, double, double, double, std::span<double> rate) {
        rate[0] = u[0] - u[0] * u[0] * u[0];
    };
    // The explicit midpoint rule on u - u^3 linearized about +-1 (rate -2)
    // is accurate well below this.
    m.max_dt = 0.05;
    return m;
}

std::vector<Point2> allen_cahn_ic_centers()
{
    using std::numbers::pi;
    return {
        {1.5 * std::cos(pi / 4), 1.5 * std::sin(pi / 4)},
        {4.0 * std::cos(pi / 12), 4.0 * std::sin(pi / 12)},
        {4.5 * std::cos(pi / 4), 4.5 * std::sin(pi / 4)},
        {4.0 * std::cos(11 * pi / 24), 4.0 * std::sin(11 * pi / 24)},
    };
}

Field2 allen_cahn_ic(const Grid2& grid)
{
    const auto centers = allen_cahn_ic_centers();
    return sample(grid, [&](double x, double y) {
        double u = 0.0;
        double sign = 1.0;
        for (const auto& c : centers) {
            u += sign * std::exp(-20.0 * ((x - c.x) * (x - c.x) + (y - c.y) * (y - c.y)));
            sign = -sign;
        }
        return u;
    });
}

void FentonKarmaParams::validate() const
{
    for (double tau : {tau_d, tau_r, tau_si, tau_0, tau_v_plus, tau_v1_minus, tau_v2_minus, tau_w_plus, tau_w_minus})
        if (!(tau > 0.0))
            throw std::invalid_argument("Fenton-Karma time constants must be positive");
    if (!(u_c > 0.0 && u_c < 1.0))
        throw std::invalid_argument("Fenton-Karma u_c must lie in (0, 1)");
    if (!(D >= 0.0))
        throw std::invalid_argument("Fenton-Karma D must be non-negative");
    if (!std::isfinite(k) || !std::isfinite(u_v) || !std::isfinite(u_c_si))
        throw std::invalid_argument("Fenton-Karma parameters must be finite");
}

namespace fk {

double j_fi(double u, double v, const FentonKarmaParams& p)
{
    return -v / p.tau_d * heaviside(u - p.u_c) * (1.0 - u) * (u - p.u_c);
}

double j_so(double u, const FentonKarmaParams& p)
{
    return u / p.tau_0 * heaviside(p.u_c - u) + heaviside(u - p.u_c) / p.tau_r;
}

double j_si(double u, double w, const FentonKarmaParams& p)
{
    return -w / (2.0 * p.tau_si) * (1.0 + std::tanh(p.k * (u - p.u_c_si)));
}

double tau_v_minus(double u, const FentonKarmaParams& p)
{
    return heaviside(u - p.u_v) * p.tau_v1_minus + heaviside(p.u_v - u) * p.tau_v2_minus;
}

} // namespace fk

ReactionModel fenton_karma(const FentonKarmaParams& params)
{
    params.validate();
    ReactionModel m;
    m.id = "fenton_karma";
    m.names = {"u", "v", "w"};
    m.diffusivity = {params.D, 0.0, 0.0};
    m.rates = [p = params](std::span<const double> s, double, double, double, std::span<double> rate) {
        using fk::heaviside;
        const double u = s[0], v = s[1], w = s[2];
        rate[0] = -fk::j_fi(u, v, p) - fk::j_so(u, p) - fk::j_si(u, w, p);
        rate[1] = heaviside(p.u_c - u) * (1.0 - v) / fk::tau_v_minus(u, p) - heaviside(u - p.u_c) * v / p.tau_v_plus;
        rate[2] = heaviside(p.u_c - u) * (1.0 - w) / p.tau_w_minus - heaviside(u - p.u_c) * w / p.tau_w_plus;
    };
    // Fast inward current time scale tau_d = 0.25 ms.
    m.max_dt = 0.02;
    return m;
}

} // namespace ssb
