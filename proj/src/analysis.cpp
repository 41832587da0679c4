#include "ssb/analysis.hpp"
#include "ssb/error.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace ssb {

double steady_annulus_radial(double r)
{
    if (!(r > 0.0))
        throw std::invalid_argument("steady_annulus: r must be positive");
    return r * r * r / 5.0 - 31.0 * r * r / 50.0 - 8.0 / (25.0 * r * r);
}

double steady_annulus_radial_derivative(double r)
{
    if (!(r > 0.0))
        throw std::invalid_argument("steady_annulus: r must be positive");
    return 3.0 * r * r / 5.0 - 31.0 * r / 25.0 + 16.0 / (25.0 * r * r * r);
}

double steady_annulus(double r, double theta) { return steady_annulus_radial(r) * std::cos(2.0 * theta); }

double steady_annulus_xy(double x, double y)
{
    const double r2 = x * x + y * y;
    if (r2 == 0.0)
        throw std::invalid_argument("steady_annulus: r must be positive");
    // cos(2 theta) = (x^2 - y^2) / r^2
    return steady_annulus_radial(std::sqrt(r2)) * (x * x - y * y) / r2;
}

double steady_annulus_max_abs(double r_in, double r_out, int samples)
{
    if (samples < 2 || !(r_out > r_in) || !(r_in > 0.0))
        throw std::invalid_argument("steady_annulus_max_abs: bad scan range");
    double m = 0.0;
    for (int k = 0; k < samples; ++k) {
        const double r = r_in + (r_out - r_in) * k / (samples - 1);
        m = std::max(m, std::abs(steady_annulus_radial(r)));
    }
    return m;
}

ErrorReport error_report(const Field2& U, const std::function<double(double, double)>& exact, const Field2& chi,
                         std::optional<double> reference_max)
{
    require_same_grid(U.grid(), chi.grid(), "error_report");
    const Grid2& g = U.grid();
    ErrorReport rep{.error = Field2(g)};
    double exact_max = 0.0;
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) {
            if (chi(i, j) != 1.0)
                continue;
            const double ex = exact(g.x(i), g.y(j));
            const double err = std::abs(U(i, j) - ex);
            rep.error(i, j) = err;
            rep.E = std::max(rep.E, err);
            exact_max = std::max(exact_max, std::abs(ex));
            ++rep.points;
        }
    if (rep.points == 0)
        throw std::invalid_argument("error_report: the domain contains no grid points");
    rep.reference_max = reference_max.value_or(exact_max);
    if (!(rep.reference_max > 0.0))
        throw std::invalid_argument("error_report: exact solution vanishes on the domain");
    rep.e = rep.E / rep.reference_max;
    return rep;
}

double interpolate(const Field2& f, double x, double y)
{
    const Grid2& g = f.grid();
    const double sx = (x - g.x0()) / g.dx();
    const double sy = (y - g.y0()) / g.dy();
    const double fx = std::floor(sx), fy = std::floor(sy);
    const double ax = sx - fx, ay = sy - fy;
    const auto wrap = [](long v, int n) { return static_cast<int>(((v % n) + n) % n); };
    const int i0 = wrap(static_cast<long>(fx), g.nx()), i1 = wrap(static_cast<long>(fx) + 1, g.nx());
    const int j0 = wrap(static_cast<long>(fy), g.ny()), j1 = wrap(static_cast<long>(fy) + 1, g.ny());
    return (1 - ax) * (1 - ay) * f(i0, j0) + ax * (1 - ay) * f(i1, j0) + (1 - ax) * ay * f(i0, j1) +
           ax * ay * f(i1, j1);
}

double boundary_flux(const Field2& U, const PhaseField& pf, const Shape& shape, int samples)
{
    require_same_grid(U.grid(), pf.grid(), "boundary_flux");
    return boundary_flux(U, Domain(shape), samples);
}

double boundary_flux(const Field2& U, const Domain& domain, int samples)
{
    const auto* shape = std::get_if<Shape>(&domain);
    if (!shape)
        throw std::invalid_argument("boundary_flux: raster masks cannot enumerate their boundary");
    const auto points = boundary_samples(*shape, samples);
    SpectralEngine engine(U.grid());
    const auto [gx, gy] = engine.gradient(U);
    double flux = 0.0;
    for (const auto& p : points)
        flux = std::max(flux, std::abs(p.nx * interpolate(gx, p.x, p.y) + p.ny * interpolate(gy, p.x, p.y)));
    return flux;
}

std::vector<Field2> reference_solve(const ReactionModel& model, std::vector<Field2> u, double t_end, double dt,
                                    int refinement)
{
    const std::size_t n = model.n_components();
    if (u.size() != n)
        throw std::invalid_argument("reference_solve: wrong number of components");
    if (!(dt > 0.0) || refinement < 1 || !(t_end >= 0.0))
        throw std::invalid_argument("reference_solve: need dt > 0, refinement >= 1, t_end >= 0");
    const Grid2 g = u.front().grid();
    for (const auto& f : u)
        require_same_grid(f.grid(), g, "reference_solve");

    const double h = dt / refinement;
    const long steps = static_cast<long>(std::ceil(t_end / h - 1e-9));
    const double step = steps > 0 ? t_end / static_cast<double>(steps) : 0.0;
    const double cx = 1.0 / (g.dx() * g.dx()), cy = 1.0 / (g.dy() * g.dy());
    double d_max = 0.0;
    for (double d : model.diffusivity)
        d_max = std::max(d_max, d);
    if (step * d_max * 2.0 * (cx + cy) > 1.0)
        throw Error("reference_solve: explicit step " + std::to_string(step) +
                    " is unstable for this grid; raise the refinement");

    std::vector<Field2> next = u;
    std::vector<double> local(n), rate(n);
    const int nx = g.nx(), ny = g.ny();
    for (long s = 0; s < steps; ++s) {
        const double t = static_cast<double>(s) * step;
        for (int j = 0; j < ny; ++j) {
            const int jm = (j + ny - 1) % ny, jp = (j + 1) % ny;
            for (int i = 0; i < nx; ++i) {
                const int im = (i + nx - 1) % nx, ip = (i + 1) % nx;
                for (std::size_t c = 0; c < n; ++c)
                    local[c] = u[c](i, j);
                model.rates(local, g.x(i), g.y(j), t, rate);
                for (std::size_t c = 0; c < n; ++c) {
                    const Field2& f = u[c];
                    const double lap = cx * (f(ip, j) - 2.0 * f(i, j) + f(im, j)) + cy * (f(i, jp) - 2.0 * f(i, j) + f(i, jm));
                    next[c](i, j) = f(i, j) + step * (model.diffusivity[c] * lap + rate[c]);
                }
            }
        }
        std::swap(u, next);
        for (const auto& f : u)
            if (!f.all_finite())
                throw Error("reference_solve: solution became non-finite");
    }
    return u;
}

int resolution_for_eta(const Box& box, double xi, double eta_target)
{
    if (!(eta_target > 0.0))
        throw std::invalid_argument("eta must be positive");
    const double side = enlarged_side(box, xi);
    const long n = std::lround(eta_target * side / xi / 2.0) * 2;
    return static_cast<int>(std::max<long>(n, 8));
}

bool is_heat_preset(const std::string& name) { return name == "annulus" || name == "quarter_annulus"; }

HeatResult run_heat_case(const HeatCase& c)
{
    if (!is_heat_preset(c.preset))
        throw std::invalid_argument("unknown heat preset '" + c.preset + "' (expected annulus or quarter_annulus)");
    const auto start = std::chrono::steady_clock::now();
    Shape shape = presets::by_name(c.preset);
    const Grid2 grid = enlarged_domain(shape, c.xi, c.N);
    Field2 chi = rasterize(shape, grid);
    SpectralEngine engine(grid);
    PhaseField pf = smooth(chi, c.xi, engine);

    ReactionModel model = heat_with_source(1.0);
    const double dt = c.dt > 0.0 ? c.dt : default_dt(model, grid);
    SplitStepper stepper(std::move(model), pf, dt);
    SolverState state;
    state.fields.emplace_back(grid);
    state = run(stepper, std::move(state), c.t_final, std::numeric_limits<int>::max(), {}, c.scheme);

    ErrorReport rep = error_report(state.fields[0], steady_annulus_xy, chi, steady_annulus_max_abs());
    rep.xi = c.xi;
    rep.eta = eta(grid, c.xi);
    rep.N = c.N;
    rep.t_final = state.t;
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return HeatResult{std::move(rep), std::move(state.fields[0]), std::move(chi), std::move(pf), std::move(shape), dt, wall};
}

std::vector<SweepRow> convergence_sweep(const std::string& preset, const std::vector<double>& xi_list,
                                        const std::vector<double>& eta_list, const SweepOptions& options)
{
    if (!is_heat_preset(preset))
        throw std::invalid_argument("convergence sweep needs an exact solution; unknown preset '" + preset + "'");
    if (xi_list.empty() || eta_list.empty())
        throw std::invalid_argument("convergence sweep needs at least one xi and one eta");
    const Box box = bounding_box(presets::by_name(preset));

    std::vector<SweepRow> rows;
    for (double xi : xi_list)
        for (double et : eta_list) {
            SweepRow row;
            row.xi = xi;
            row.eta = et;
            row.t_final = options.t_final;
            rows.push_back(row);
        }

    std::atomic<std::size_t> next{0};
    std::mutex report_mutex;
    const auto worker = [&] {
        for (std::size_t k = next++; k < rows.size(); k = next++) {
            SweepRow& row = rows[k];
            const auto start = std::chrono::steady_clock::now();
            try {
                row.N = resolution_for_eta(box, row.xi, row.eta);
                HeatCase c{preset, row.xi, row.N, options.dt, options.t_final, options.scheme};
                const HeatResult res = run_heat_case(c);
                row.E = res.report.E;
                row.e = res.report.e;
            } catch (const std::exception& ex) {
                row.E = row.e = std::numeric_limits<double>::quiet_NaN();
                row.failure = ex.what();
            }
            row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            if (options.progress) {
                std::lock_guard lock(report_mutex);
                options.progress(row);
            }
        }
    };

    const int jobs = std::clamp(options.jobs, 1, static_cast<int>(rows.size()));
    std::vector<std::thread> pool;
    for (int w = 1; w < jobs; ++w)
        pool.emplace_back(worker);
    worker();
    for (auto& th : pool)
        th.join();
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows)
{
    out << "xi,eta,N,t_final,E,e,wall_seconds\n";
    out << std::setprecision(17);
    for (const auto& r : rows)
        out << r.xi << ',' << r.eta << ',' << r.N << ',' << r.t_final << ',' << r.E << ',' << r.e << ','
            << std::setprecision(6) << r.wall_seconds << std::setprecision(17) << '\n';
}

} // namespace ssb
