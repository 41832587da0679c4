#include "ssb/geometry.hpp"
#include "ssb/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ssb {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 2.0 * std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool in_sector(const shapes::Sector& s, double x, double y)
{
    if (s.theta_max - s.theta_min >= kTwoPi)
        return true;
    const double dx = x - s.cx;
    const double dy = y - s.cy;
    if (dx == 0.0 && dy == 0.0)
        return true; // apex
    const double theta = std::atan2(dy, dx);
    double shifted = std::fmod(theta - s.theta_min, kTwoPi);
    if (shifted < 0.0)
        shifted += kTwoPi;
    return s.theta_min + shifted <= s.theta_max;
}

double cross(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

bool on_segment(const std::array<double, 2>& a, const std::array<double, 2>& b, double x, double y)
{
    if (cross(b[0] - a[0], b[1] - a[1], x - a[0], y - a[1]) != 0.0)
        return false;
    return x >= std::min(a[0], b[0]) && x <= std::max(a[0], b[0]) && y >= std::min(a[1], b[1]) &&
           y <= std::max(a[1], b[1]);
}

bool in_polygon(const shapes::Polygon& p, double x, double y)
{
    const auto& v = p.vertices;
    const std::size_t n = v.size();
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        if (on_segment(v[j], v[i], x, y))
            return true;
        // even-odd crossing test
        if ((v[i][1] > y) != (v[j][1] > y)) {
            const double xc = v[j][0] + (y - v[j][1]) * (v[i][0] - v[j][0]) / (v[i][1] - v[j][1]);
            if (x < xc)
                inside = !inside;
        }
    }
    return inside;
}

bool segments_intersect(const std::array<double, 2>& p1, const std::array<double, 2>& p2,
                        const std::array<double, 2>& q1, const std::array<double, 2>& q2)
{
    const auto orient = [](const std::array<double, 2>& a, const std::array<double, 2>& b,
                           const std::array<double, 2>& c) {
        const double v = cross(b[0] - a[0], b[1] - a[1], c[0] - a[0], c[1] - a[1]);
        return (v > 0.0) - (v < 0.0);
    };
    const int o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
    const int o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
    if (o1 != o2 && o3 != o4)
        return true;
    if (o1 == 0 && on_segment(p1, p2, q1[0], q1[1]))
        return true;
    if (o2 == 0 && on_segment(p1, p2, q2[0], q2[1]))
        return true;
    if (o3 == 0 && on_segment(q1, q2, p1[0], p1[1]))
        return true;
    if (o4 == 0 && on_segment(q1, q2, p2[0], p2[1]))
        return true;
    return false;
}

void require_simple(const std::vector<std::array<double, 2>>& v)
{
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if (adjacent)
                continue;
            if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
                throw std::invalid_argument("polygon is not simple");
        }
}

Box hull(const Box& a, const Box& b)
{
    return {std::min(a.x_min, b.x_min), std::max(a.x_max, b.x_max), std::min(a.y_min, b.y_min),
            std::max(a.y_max, b.y_max)};
}

Box overlap(const Box& a, const Box& b)
{
    return {std::max(a.x_min, b.x_min), std::min(a.x_max, b.x_max), std::max(a.y_min, b.y_min),
            std::min(a.y_max, b.y_max)};
}

void require_inside_box(const Box& box, const Grid2& grid)
{
    const double tol = 1e-12 * std::max(grid.lx(), grid.ly());
    if (box.x_min < grid.x0() - tol || box.x_max > grid.x0() + grid.lx() + tol || box.y_min < grid.y0() - tol ||
        box.y_max > grid.y0() + grid.ly() + tol)
        throw std::invalid_argument("domain extends beyond the computational box");
}

} // namespace

bool Box::finite() const
{
    return std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(y_min) && std::isfinite(y_max);
}

Shape Shape::circle(double cx, double cy, double r)
{
    if (!(r > 0.0))
        throw std::invalid_argument("circle radius must be positive");
    return Shape(shapes::Circle{cx, cy, r});
}

Shape Shape::annulus(double cx, double cy, double r_in, double r_out)
{
    if (!(r_in >= 0.0) || !(r_out > r_in))
        throw std::invalid_argument("annulus needs r_out > r_in >= 0");
    return Shape(shapes::Annulus{cx, cy, r_in, r_out});
}

Shape Shape::rectangle(double x_min, double x_max, double y_min, double y_max)
{
    if (!(x_max > x_min) || !(y_max > y_min))
        throw std::invalid_argument("rectangle needs max > min on both axes");
    return Shape(shapes::Rectangle{x_min, x_max, y_min, y_max});
}

Shape Shape::sector(double cx, double cy, double theta_min, double theta_max)
{
    if (!(theta_max > theta_min))
        throw std::invalid_argument("sector needs theta_min < theta_max");
    return Shape(shapes::Sector{cx, cy, theta_min, theta_max});
}

Shape Shape::polygon(std::vector<std::array<double, 2>> vertices)
{
    if (vertices.size() < 3)
        throw std::invalid_argument("polygon needs at least 3 vertices");
    require_simple(vertices);
    return Shape(shapes::Polygon{std::move(vertices)});
}

Shape Shape::unite(Shape a, Shape b)
{
    return Shape(shapes::Union{std::make_shared<const Shape>(std::move(a)), std::make_shared<const Shape>(std::move(b))});
}

Shape Shape::intersect(Shape a, Shape b)
{
    return Shape(
        shapes::Intersection{std::make_shared<const Shape>(std::move(a)), std::make_shared<const Shape>(std::move(b))});
}

Shape Shape::subtract(Shape a, Shape b)
{
    return Shape(
        shapes::Difference{std::make_shared<const Shape>(std::move(a)), std::make_shared<const Shape>(std::move(b))});
}

bool contains(const Shape& shape, double x, double y)
{
    return std::visit(
        overloaded{
            [&](const shapes::Circle& c) { return std::hypot(x - c.cx, y - c.cy) <= c.r; },
            [&](const shapes::Annulus& a) {
                const double r = std::hypot(x - a.cx, y - a.cy);
                return r >= a.r_in && r <= a.r_out;
            },
            [&](const shapes::Rectangle& r) {
                return x >= r.x_min && x <= r.x_max && y >= r.y_min && y <= r.y_max;
            },
            [&](const shapes::Sector& s) { return in_sector(s, x, y); },
            [&](const shapes::Polygon& p) { return in_polygon(p, x, y); },
            [&](const shapes::Union& u) { return contains(*u.a, x, y) || contains(*u.b, x, y); },
            [&](const shapes::Intersection& i) { return contains(*i.a, x, y) && contains(*i.b, x, y); },
            [&](const shapes::Difference& d) { return contains(*d.a, x, y) && !contains(*d.b, x, y); },
        },
        shape.node());
}

Box bounding_box(const Shape& shape)
{
    return std::visit(
        overloaded{
            [](const shapes::Circle& c) { return Box{c.cx - c.r, c.cx + c.r, c.cy - c.r, c.cy + c.r}; },
            [](const shapes::Annulus& a) {
                return Box{a.cx - a.r_out, a.cx + a.r_out, a.cy - a.r_out, a.cy + a.r_out};
            },
            [](const shapes::Rectangle& r) { return Box{r.x_min, r.x_max, r.y_min, r.y_max}; },
            [](const shapes::Sector&) { return Box{-kInf, kInf, -kInf, kInf}; },
            [](const shapes::Polygon& p) {
                Box b{kInf, -kInf, kInf, -kInf};
                for (const auto& v : p.vertices)
                    b = hull(b, Box{v[0], v[0], v[1], v[1]});
                return b;
            },
            [](const shapes::Union& u) { return hull(bounding_box(*u.a), bounding_box(*u.b)); },
            [](const shapes::Intersection& i) { return overlap(bounding_box(*i.a), bounding_box(*i.b)); },
            [](const shapes::Difference& d) { return bounding_box(*d.a); },
        },
        shape.node());
}

bool contains(const RasterMask& mask, double x, double y)
{
    const double fx = std::floor((x - mask.origin_x) / mask.pixel_size);
    const double fy = std::floor((y - mask.origin_y) / mask.pixel_size);
    if (fx < 0.0 || fy < 0.0 || fx >= mask.width || fy >= mask.height)
        return false;
    return mask.at(static_cast<int>(fx), static_cast<int>(fy)) != 0;
}

Box bounding_box(const RasterMask& mask)
{
    return {mask.origin_x, mask.origin_x + mask.width * mask.pixel_size, mask.origin_y,
            mask.origin_y + mask.height * mask.pixel_size};
}

namespace {

// Whitespace/comment aware token reader for the PGM header.
std::string next_token(std::istream& in)
{
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty())
                break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

long parse_positive(const std::string& tok, const char* what)
{
    try {
        std::size_t used = 0;
        const long v = std::stol(tok, &used);
        if (used != tok.size() || v <= 0)
            throw std::invalid_argument(what);
        return v;
    } catch (const std::logic_error&) {
        throw IoError(std::string("malformed PGM: bad ") + what);
    }
}

} // namespace

RasterMask load_mask(const std::filesystem::path& path, double origin_x, double origin_y, double pixel_size)
{
    if (!(pixel_size > 0.0))
        throw std::invalid_argument("mask pixel size must be positive");
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open mask file " + path.string());

    const std::string magic = next_token(in);
    if (magic != "P2" && magic != "P5")
        throw IoError("unsupported image format in " + path.string() + " (expected P2 or P5 PGM)");
    const long width = parse_positive(next_token(in), "width");
    const long height = parse_positive(next_token(in), "height");
    const long maxval = parse_positive(next_token(in), "maxval");
    if (maxval > 65535)
        throw IoError("malformed PGM: maxval above 65535");

    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::vector<long> raw(count);
    if (magic == "P2") {
        for (auto& v : raw) {
            const std::string tok = next_token(in);
            if (tok.empty())
                throw IoError("malformed PGM: truncated pixel data");
            try {
                v = std::stol(tok);
            } catch (const std::logic_error&) {
                throw IoError("malformed PGM: bad pixel value");
            }
            if (v < 0 || v > maxval)
                throw IoError("malformed PGM: pixel value out of range");
        }
    } else {
        // next_token consumed exactly one whitespace byte after maxval.
        const int bytes = maxval < 256 ? 1 : 2;
        std::vector<unsigned char> buf(count * static_cast<std::size_t>(bytes));
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (static_cast<std::size_t>(in.gcount()) != buf.size())
            throw IoError("malformed PGM: truncated pixel data");
        for (std::size_t k = 0; k < count; ++k)
            raw[k] = bytes == 1 ? buf[k] : (static_cast<long>(buf[2 * k]) << 8) | buf[2 * k + 1];
        for (long v : raw)
            if (v > maxval)
                throw IoError("malformed PGM: pixel value out of range");
    }

    RasterMask mask;
    mask.width = static_cast<int>(width);
    mask.height = static_cast<int>(height);
    mask.origin_x = origin_x;
    mask.origin_y = origin_y;
    mask.pixel_size = pixel_size;
    mask.pixels.resize(count);
    for (long r = 0; r < height; ++r) {
        const long py = height - 1 - r; // image top row -> highest y
        for (long c = 0; c < width; ++c)
            mask.pixels[static_cast<std::size_t>(py * width + c)] =
                2 * raw[static_cast<std::size_t>(r * width + c)] > maxval ? 1 : 0;
    }
    return mask;
}

bool contains(const Domain& domain, double x, double y)
{
    return std::visit([&](const auto& d) { return contains(d, x, y); }, domain);
}

Box bounding_box(const Domain& domain)
{
    return std::visit([](const auto& d) { return bounding_box(d); }, domain);
}

Field2 rasterize(const Shape& shape, const Grid2& grid)
{
    const Box box = bounding_box(shape);
    if (!box.finite())
        throw std::invalid_argument("cannot rasterize an unbounded shape");
    // Empty intersections give an inverted box; nothing to check then.
    if (box.x_min <= box.x_max && box.y_min <= box.y_max)
        require_inside_box(box, grid);
    return sample(grid, [&](double x, double y) { return contains(shape, x, y) ? 1.0 : 0.0; });
}

Field2 rasterize(const RasterMask& mask, const Grid2& grid)
{
    require_inside_box(bounding_box(mask), grid);
    return sample(grid, [&](double x, double y) { return contains(mask, x, y) ? 1.0 : 0.0; });
}

Field2 rasterize(const Domain& domain, const Grid2& grid)
{
    return std::visit([&](const auto& d) { return rasterize(d, grid); }, domain);
}

double enlarged_side(const Box& box, double xi)
{
    if (!(xi > 0.0))
        throw std::invalid_argument("xi must be positive");
    if (!box.finite() || box.x_max < box.x_min || box.y_max < box.y_min)
        throw std::invalid_argument("domain has no finite bounding box");
    return std::max(box.width(), box.height()) + 2.0 * kMarginFactor * xi;
}

Grid2 enlarged_domain(const Box& box, double xi, int n)
{
    const double side = enlarged_side(box, xi);
    const double cx = 0.5 * (box.x_min + box.x_max);
    const double cy = 0.5 * (box.y_min + box.y_max);
    return Grid2(n, n, side, side, cx - 0.5 * side, cy - 0.5 * side);
}

Grid2 enlarged_domain(const Shape& shape, double xi, int n) { return enlarged_domain(bounding_box(shape), xi, n); }

Grid2 enlarged_domain(const Domain& domain, double xi, int n)
{
    return enlarged_domain(bounding_box(domain), xi, n);
}

namespace {

struct Candidate {
    double x, y, nx, ny;
};

// Sector rays only matter inside the composite's bounding box.
double sector_reach(const shapes::Sector& s, const Box& box)
{
    double r = 0.0;
    for (double x : {box.x_min, box.x_max})
        for (double y : {box.y_min, box.y_max})
            r = std::max(r, std::hypot(x - s.cx, y - s.cy));
    return r;
}

// Samples along a primitive's boundary at the given arc-length spacing.
void primitive_candidates(const Shape& shape, double spacing, const Box& box, std::vector<Candidate>& out)
{
    const auto circle = [&](double cx, double cy, double r, double sign) {
        const int n = std::max(8, static_cast<int>(std::ceil(kTwoPi * r / spacing)));
        for (int k = 0; k < n; ++k) {
            const double th = kTwoPi * (k + 0.5) / n;
            out.push_back({cx + r * std::cos(th), cy + r * std::sin(th), sign * std::cos(th), sign * std::sin(th)});
        }
    };
    const auto segment = [&](double ax, double ay, double bx, double by) {
        const double len = std::hypot(bx - ax, by - ay);
        if (len == 0.0)
            return;
        const int n = std::max(2, static_cast<int>(std::ceil(len / spacing)));
        // Orientation is fixed up by the side test in boundary_samples.
        const double nx = (by - ay) / len, ny = -(bx - ax) / len;
        for (int k = 0; k < n; ++k) {
            const double s = (k + 0.5) / n;
            out.push_back({ax + s * (bx - ax), ay + s * (by - ay), nx, ny});
        }
    };

    std::visit(overloaded{
                   [&](const shapes::Circle& c) { circle(c.cx, c.cy, c.r, 1.0); },
                   [&](const shapes::Annulus& a) {
                       circle(a.cx, a.cy, a.r_out, 1.0);
                       if (a.r_in > 0.0)
                           circle(a.cx, a.cy, a.r_in, -1.0);
                   },
                   [&](const shapes::Rectangle& r) {
                       segment(r.x_min, r.y_min, r.x_max, r.y_min);
                       segment(r.x_max, r.y_min, r.x_max, r.y_max);
                       segment(r.x_max, r.y_max, r.x_min, r.y_max);
                       segment(r.x_min, r.y_max, r.x_min, r.y_min);
                   },
                   [&](const shapes::Sector& s) {
                       if (s.theta_max - s.theta_min >= kTwoPi)
                           return;
                       const double reach = sector_reach(s, box);
                       for (double th : {s.theta_min, s.theta_max})
                           segment(s.cx, s.cy, s.cx + reach * std::cos(th), s.cy + reach * std::sin(th));
                   },
                   [&](const shapes::Polygon& p) {
                       const auto& v = p.vertices;
                       for (std::size_t i = 0; i < v.size(); ++i) {
                           const auto& a = v[i];
                           const auto& b = v[(i + 1) % v.size()];
                           segment(a[0], a[1], b[0], b[1]);
                       }
                   },
                   [&](const shapes::Union& u) {
                       primitive_candidates(*u.a, spacing, box, out);
                       primitive_candidates(*u.b, spacing, box, out);
                   },
                   [&](const shapes::Intersection& i) {
                       primitive_candidates(*i.a, spacing, box, out);
                       primitive_candidates(*i.b, spacing, box, out);
                   },
                   [&](const shapes::Difference& d) {
                       primitive_candidates(*d.a, spacing, box, out);
                       primitive_candidates(*d.b, spacing, box, out);
                   },
               },
               shape.node());
}

double primitive_length(const Shape& shape, const Box& box)
{
    return std::visit(overloaded{
                          [](const shapes::Circle& c) { return kTwoPi * c.r; },
                          [](const shapes::Annulus& a) { return kTwoPi * (a.r_in + a.r_out); },
                          [](const shapes::Rectangle& r) { return 2.0 * ((r.x_max - r.x_min) + (r.y_max - r.y_min)); },
                          [&](const shapes::Sector& s) { return 2.0 * sector_reach(s, box); },
                          [](const shapes::Polygon& p) {
                              double len = 0.0;
                              for (std::size_t i = 0; i < p.vertices.size(); ++i) {
                                  const auto& a = p.vertices[i];
                                  const auto& b = p.vertices[(i + 1) % p.vertices.size()];
                                  len += std::hypot(b[0] - a[0], b[1] - a[1]);
                              }
                              return len;
                          },
                          [&](const shapes::Union& u) { return primitive_length(*u.a, box) + primitive_length(*u.b, box); },
                          [&](const shapes::Intersection& i) {
                              return primitive_length(*i.a, box) + primitive_length(*i.b, box);
                          },
                          [&](const shapes::Difference& d) {
                              return primitive_length(*d.a, box) + primitive_length(*d.b, box);
                          },
                      },
                      shape.node());
}

} // namespace

std::vector<BoundarySample> boundary_samples(const Shape& shape, int samples)
{
    if (samples < 1)
        throw std::invalid_argument("need at least one boundary sample");
    const Box box = bounding_box(shape);
    if (!box.finite())
        throw std::invalid_argument("shape has an unbounded boundary");
    const double size = std::max(box.width(), box.height());
    const double delta = 1e-7 * size;

    // A primitive boundary point lies on the composite boundary when the
    // composite is inside on one side and outside on the other.
    const auto collect = [&](double spacing) {
        std::vector<Candidate> candidates;
        primitive_candidates(shape, spacing, box, candidates);
        std::vector<BoundarySample> kept;
        for (const auto& c : candidates) {
            const bool minus = contains(shape, c.x - delta * c.nx, c.y - delta * c.ny);
            const bool plus = contains(shape, c.x + delta * c.nx, c.y + delta * c.ny);
            if (minus && !plus)
                kept.push_back({c.x, c.y, c.nx, c.ny});
            else if (plus && !minus)
                kept.push_back({c.x, c.y, -c.nx, -c.ny});
        }
        return kept;
    };

    // First pass measures how much primitive boundary survives, second pass
    // spaces points so that about `samples` of them are kept.
    const double spacing = primitive_length(shape, box) / samples;
    auto out = collect(spacing);
    if (!out.empty() && static_cast<int>(out.size()) < samples)
        out = collect(spacing * static_cast<double>(out.size()) / samples);
    return out;
}

namespace presets {

Shape annulus() { return Shape::annulus(0.0, 0.0, 1.0, 2.0); }

Shape quarter_annulus()
{
    return Shape::intersect(Shape::annulus(0.0, 0.0, 1.0, 2.0), Shape::sector(0.0, 0.0, 0.0, std::numbers::pi / 2));
}

Shape zhole_annulus()
{
    constexpr double deg = std::numbers::pi / 180.0;
    // Inner ring piece at 15-30 deg, both rings at 30-60 deg, outer ring
    // piece at 60-75 deg.
    Shape lower = Shape::intersect(Shape::annulus(0.0, 0.0, 2.0, 3.0), Shape::sector(0.0, 0.0, 15 * deg, 60 * deg));
    Shape upper = Shape::intersect(Shape::annulus(0.0, 0.0, 3.0, 4.0), Shape::sector(0.0, 0.0, 30 * deg, 75 * deg));
    return Shape::subtract(Shape::annulus(0.0, 0.0, 1.0, 5.0), Shape::unite(std::move(lower), std::move(upper)));
}

Shape strip() { return Shape::rectangle(0.0, 1.0, 0.0, 4.0); }

Shape by_name(const std::string& name)
{
    if (name == "annulus")
        return annulus();
    if (name == "quarter_annulus")
        return quarter_annulus();
    if (name == "zhole_annulus")
        return zhole_annulus();
    if (name == "strip")
        return strip();
    throw std::invalid_argument("unknown geometry preset '" + name + "'");
}

} // namespace presets

} // namespace ssb
