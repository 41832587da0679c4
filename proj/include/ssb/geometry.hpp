#pragma once

#include "ssb/grid.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace ssb {

struct Box {
    double x_min, x_max, y_min, y_max;

    bool finite() const;
    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
};

class Shape;

namespace shapes {

struct Circle {
    double cx, cy, r;
};
struct Annulus {
    double cx, cy, r_in, r_out;
};
struct Rectangle {
    double x_min, x_max, y_min, y_max;
};
// Infinite wedge theta_min <= atan2(y - cy, x - cx) <= theta_max (mod 2pi).
struct Sector {
    double cx, cy, theta_min, theta_max;
};
struct Polygon {
    std::vector<std::array<double, 2>> vertices;
};
struct Union {
    std::shared_ptr<const Shape> a, b;
};
struct Intersection {
    std::shared_ptr<const Shape> a, b;
};
struct Difference {
    std::shared_ptr<const Shape> a, b;
};

} // namespace shapes

// Constructive solid geometry over a handful of primitives. Points on the
// boundary of a primitive count as inside it.
class Shape {
public:
    using Node = std::variant<shapes::Circle, shapes::Annulus, shapes::Rectangle, shapes::Sector, shapes::Polygon,
                              shapes::Union, shapes::Intersection, shapes::Difference>;

    const Node& node() const { return node_; }

    static Shape circle(double cx, double cy, double r);
    static Shape annulus(double cx, double cy, double r_in, double r_out);
    static Shape rectangle(double x_min, double x_max, double y_min, double y_max);
    static Shape sector(double cx, double cy, double theta_min, double theta_max);
    static Shape polygon(std::vector<std::array<double, 2>> vertices);
    static Shape unite(Shape a, Shape b);
    static Shape intersect(Shape a, Shape b);
    static Shape subtract(Shape a, Shape b);

private:
    explicit Shape(Node node) : node_(std::move(node)) {}
    Node node_;
};

bool contains(const Shape& shape, double x, double y);

// Axis-aligned bounds; infinite along unbounded directions (bare sectors).
Box bounding_box(const Shape& shape);

// Binary image placed in physical space. Row 0 is the bottom row (lowest y);
// load_mask flips the PGM so the image appears upright.
struct RasterMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels; // row-major, values 0 or 1
    double origin_x = 0.0;
    double origin_y = 0.0;
    double pixel_size = 1.0;

    std::uint8_t at(int px, int py) const
    {
        return pixels[static_cast<std::size_t>(py) * static_cast<std::size_t>(width) + static_cast<std::size_t>(px)];
    }
};

// Nearest-pixel membership; points outside the image are outside.
bool contains(const RasterMask& mask, double x, double y);
Box bounding_box(const RasterMask& mask);

// Reads P2 or P5 graymaps. Pixels strictly above half of maxval become 1.
RasterMask load_mask(const std::filesystem::path& path, double origin_x = 0.0, double origin_y = 0.0,
                     double pixel_size = 1.0);

using Domain = std::variant<Shape, RasterMask>;

bool contains(const Domain& domain, double x, double y);
Box bounding_box(const Domain& domain);

// Indicator field: 1 at grid points inside, 0 elsewhere. Throws if the
// domain extends beyond the periodic box.
Field2 rasterize(const Shape& shape, const Grid2& grid);
Field2 rasterize(const RasterMask& mask, const Grid2& grid);
Field2 rasterize(const Domain& domain, const Grid2& grid);

// Square N x N grid around the bounding square of the domain, inflated by
// margin_factor * xi on every side and centered on the bounding-box center.
constexpr double kMarginFactor = 10.0;
Grid2 enlarged_domain(const Box& box, double xi, int n);
Grid2 enlarged_domain(const Shape& shape, double xi, int n);
Grid2 enlarged_domain(const Domain& domain, double xi, int n);

// Side length of the enlarged square for a given xi.
double enlarged_side(const Box& box, double xi);

struct BoundarySample {
    double x, y;
    double nx, ny; // outward unit normal
};

// Points on the boundary with outward normals, roughly evenly spaced by arc
// length. Throws std::invalid_argument for shapes with unbounded boundary.
std::vector<BoundarySample> boundary_samples(const Shape& shape, int samples);

// Named shapes used by the heat, Allen-Cahn and Fenton-Karma setups.
namespace presets {
Shape annulus();         // 1 <= r <= 2
Shape quarter_annulus(); // 1 <= r <= 2, 0 <= theta <= pi/2
Shape zhole_annulus();   // 1 <= r <= 5 minus a Z-shaped hole
Shape strip();           // 1 cm x 4 cm rectangle [0,1] x [0,4]

// Throws std::invalid_argument for unknown names.
Shape by_name(const std::string& name);
} // namespace presets

} // namespace ssb
