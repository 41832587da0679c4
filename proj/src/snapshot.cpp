#include "ssb/snapshot.hpp"

#include "ssb/error.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace ssb {

namespace {

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path)
{
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

std::uint64_t to_little(std::uint64_t v)
{
    if constexpr (std::endian::native == std::endian::big) {
        std::uint64_t r = 0;
        for (int b = 0; b < 8; ++b) r |= ((v >> (8 * b)) & 0xffu) << (8 * (7 - b));
        return r;
    }
    return v;
}

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void write_snapshot(const std::filesystem::path& path, const Field2& field, double t, const std::string& name)
{
    if (name.empty() || std::any_of(name.begin(), name.end(), [](unsigned char c) { return std::isspace(c); }))
        throw std::invalid_argument("snapshot name must be a non-empty word: '" + name + "'");
    const Grid2& g = field.grid();
    std::string header = std::string(kSnapshotMagic) + " " + std::to_string(g.nx()) + " " + std::to_string(g.ny()) +
                         " " + fmt(g.lx()) + " " + fmt(g.ly()) + " " + fmt(g.x0()) + " " + fmt(g.y0()) + " " +
                         fmt(t) + " " + name + "\n";
    std::vector<std::uint64_t> payload(field.size());
    auto data = field.data();
    for (std::size_t k = 0; k < payload.size(); ++k) payload[k] = to_little(std::bit_cast<std::uint64_t>(data[k]));

    auto out = open_out(path);
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size() * 8));
    finish(out, path);
}

Snapshot read_snapshot(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw IoError(path.string() + ": missing header");

    std::istringstream hs(line);
    std::string magic, name;
    int nx = 0, ny = 0;
    double lx = 0, ly = 0, x0 = 0, y0 = 0, t = 0;
    hs >> magic >> nx >> ny >> lx >> ly >> x0 >> y0 >> t >> name;
    std::string extra;
    if (!hs || magic != kSnapshotMagic || (hs >> extra))
        throw IoError(path.string() + ": malformed snapshot header");

    Grid2 grid = [&] {
        try {
            return Grid2(nx, ny, lx, ly, x0, y0);
        } catch (const std::invalid_argument& e) {
            throw IoError(path.string() + ": " + e.what());
        }
    }();

    std::vector<std::uint64_t> payload(grid.size());
    in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size() * 8));
    if (in.gcount() != static_cast<std::streamsize>(payload.size() * 8))
        throw IoError(path.string() + ": truncated payload");
    if (in.peek() != std::char_traits<char>::eof()) throw IoError(path.string() + ": trailing bytes after payload");

    Field2 field(grid);
    auto data = field.data();
    for (std::size_t k = 0; k < payload.size(); ++k) data[k] = std::bit_cast<double>(to_little(payload[k]));
    return {std::move(field), t, name};
}

void write_csv(const std::filesystem::path& path, const Field2& field)
{
    const Grid2& g = field.grid();
    auto out = open_out(path);
    out << "x,y,value\n";
    for (int j = 0; j < g.ny(); ++j)
        for (int i = 0; i < g.nx(); ++i) out << fmt(g.x(i)) << ',' << fmt(g.y(j)) << ',' << fmt(field(i, j)) << '\n';
    finish(out, path);
}

void write_pgm(const std::filesystem::path& path, const Field2& field, double lo, double hi)
{
    const Grid2& g = field.grid();
    if (lo == hi) {
        auto [mn, mx] = std::minmax_element(field.data().begin(), field.data().end());
        lo = *mn;
        hi = *mx;
    }
    const double span = hi > lo ? hi - lo : 1.0;

    std::vector<unsigned char> pixels(field.size());
    std::size_t k = 0;
    for (int j = g.ny() - 1; j >= 0; --j)
        for (int i = 0; i < g.nx(); ++i) {
            double v = field(i, j);
            double s = std::isfinite(v) ? std::clamp((v - lo) / span, 0.0, 1.0) : 0.0;
            pixels[k++] = static_cast<unsigned char>(std::lround(255.0 * s));
        }

    auto out = open_out(path);
    out << "P5\n" << g.nx() << ' ' << g.ny() << "\n255\n";
    out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
    finish(out, path);
}

} // namespace ssb
