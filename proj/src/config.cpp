#include "ssb/config.hpp"

#include "ssb/analysis.hpp"
#include "ssb/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ssb {

using nlohmann::json;

namespace {

// Wraps one JSON object; every key must be consumed before finish().
class Obj {
public:
    Obj(const json& j, std::string where) : j_(j), where_(std::move(where))
    {
        if (!j_.is_object())
            fail("expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& at(const std::string& key)
    {
        if (!j_.contains(key))
            fail("missing key '" + key + "'");
        used_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key)
    {
        const json& v = at(key);
        if (!v.is_number())
            fail("'" + key + "' must be a number");
        const double d = v.get<double>();
        if (!std::isfinite(d))
            fail("'" + key + "' must be finite");
        return d;
    }

    double number_or(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    long integer(const std::string& key)
    {
        const json& v = at(key);
        if (v.is_number_integer())
            return v.get<long>();
        if (v.is_number_float()) {
            const double d = v.get<double>();
            if (std::isfinite(d) && d == std::floor(d) && std::abs(d) < 1e15)
                return static_cast<long>(d);
        }
        fail("'" + key + "' must be an integer");
    }

    std::string string(const std::string& key)
    {
        const json& v = at(key);
        if (!v.is_string())
            fail("'" + key + "' must be a string");
        return v.get<std::string>();
    }

    bool boolean(const std::string& key)
    {
        const json& v = at(key);
        if (!v.is_boolean())
            fail("'" + key + "' must be true or false");
        return v.get<bool>();
    }

    std::vector<double> numbers(const std::string& key, std::size_t count = 0)
    {
        const json& v = at(key);
        if (!v.is_array())
            fail("'" + key + "' must be an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number() || !std::isfinite(e.get<double>()))
                fail("'" + key + "' must contain finite numbers only");
            out.push_back(e.get<double>());
        }
        if (count && out.size() != count)
            fail("'" + key + "' must have " + std::to_string(count) + " entries");
        return out;
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!used_.count(it.key()))
                fail("unknown key '" + it.key() + "'");
    }

    [[noreturn]] void fail(const std::string& msg) const
    {
        throw ConfigError(where_.empty() ? msg : where_ + ": " + msg);
    }

    const std::string& where() const { return where_; }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> used_;
};

std::string child(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

Shape parse_shape(const json& j, const std::string& where)
{
    Obj o(j, where);
    const std::string type = o.string("type");
    Shape s = [&]() -> Shape {
        try {
            if (type == "circle")
                return Shape::circle(o.number("cx"), o.number("cy"), o.number("r"));
            if (type == "annulus")
                return Shape::annulus(o.number("cx"), o.number("cy"), o.number("r_in"), o.number("r_out"));
            if (type == "rectangle")
                return Shape::rectangle(o.number("x_min"), o.number("x_max"), o.number("y_min"), o.number("y_max"));
            if (type == "sector")
                return Shape::sector(o.number("cx"), o.number("cy"), o.number("theta_min"), o.number("theta_max"));
            if (type == "polygon") {
                const json& v = o.at("vertices");
                if (!v.is_array())
                    o.fail("'vertices' must be an array of [x, y] pairs");
                std::vector<std::array<double, 2>> pts;
                for (const auto& p : v) {
                    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                        o.fail("'vertices' must be an array of [x, y] pairs");
                    pts.push_back({p[0].get<double>(), p[1].get<double>()});
                }
                return Shape::polygon(std::move(pts));
            }
            if (type == "union" || type == "intersection" || type == "difference") {
                Shape a = parse_shape(o.at("a"), child(where, "a"));
                Shape b = parse_shape(o.at("b"), child(where, "b"));
                if (type == "union")
                    return Shape::unite(std::move(a), std::move(b));
                if (type == "intersection")
                    return Shape::intersect(std::move(a), std::move(b));
                return Shape::subtract(std::move(a), std::move(b));
            }
        } catch (const std::invalid_argument& e) {
            o.fail(e.what());
        }
        o.fail("unknown shape type '" + type + "'");
    }();
    o.finish();
    return s;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
    std::filesystem::path path(p);
    if (path.is_relative())
        path = base / path;
    return path.lexically_normal();
}

void require_file(const std::filesystem::path& path, const Obj& o)
{
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec))
        o.fail("file not found: " + path.string());
}

GeometrySpec parse_geometry(const json& j, const std::filesystem::path& base)
{
    Obj o(j, "geometry");
    GeometrySpec g;
    const int kinds = int(o.has("preset")) + int(o.has("shape")) + int(o.has("mask"));
    if (kinds != 1)
        o.fail("give exactly one of 'preset', 'shape' or 'mask'");
    if (o.has("preset")) {
        g.preset = o.string("preset");
        try {
            presets::by_name(g.preset);
        } catch (const std::invalid_argument& e) {
            o.fail(e.what());
        }
    } else if (o.has("shape")) {
        const json& s = o.at("shape");
        parse_shape(s, "geometry.shape");
        g.shape_json = s.dump();
    } else {
        Obj m(o.at("mask"), "geometry.mask");
        g.mask_path = resolve(base, m.string("path"));
        require_file(g.mask_path, m);
        if (m.has("origin")) {
            auto v = m.numbers("origin", 2);
            g.mask_origin_x = v[0];
            g.mask_origin_y = v[1];
        }
        g.mask_pixel_size = m.number("pixel_size");
        if (!(g.mask_pixel_size > 0.0))
            m.fail("'pixel_size' must be positive");
        m.finish();
    }
    o.finish();
    return g;
}

ModelSpec parse_model(const json& j)
{
    Obj o(j, "model");
    ModelSpec m;
    m.type = o.string("type");
    if (m.type == "heat") {
        m.D = o.number_or("D", 1.0);
        if (o.has("center")) {
            auto c = o.numbers("center", 2);
            m.cx = c[0];
            m.cy = c[1];
        }
        if (!(m.D > 0.0))
            o.fail("'D' must be positive");
    } else if (m.type == "allen_cahn") {
        m.eps = o.number("eps");
        if (!(m.eps > 0.0))
            o.fail("'eps' must be positive");
    } else if (m.type == "fenton_karma") {
        auto& p = m.fk;
        const std::pair<const char*, double*> fields[] = {
            {"tau_d", &p.tau_d},           {"tau_r", &p.tau_r},
            {"tau_si", &p.tau_si},         {"tau_0", &p.tau_0},
            {"tau_v_plus", &p.tau_v_plus}, {"tau_v1_minus", &p.tau_v1_minus},
            {"tau_v2_minus", &p.tau_v2_minus}, {"tau_w_plus", &p.tau_w_plus},
            {"tau_w_minus", &p.tau_w_minus}, {"u_c", &p.u_c},
            {"u_v", &p.u_v},               {"u_c_si", &p.u_c_si},
            {"k", &p.k},                   {"D", &p.D},
        };
        for (const auto& [key, dst] : fields)
            if (o.has(key))
                *dst = o.number(key);
        try {
            p.validate();
        } catch (const std::invalid_argument& e) {
            o.fail(e.what());
        }
    } else {
        o.fail("unknown model type '" + m.type + "' (expected heat, allen_cahn or fenton_karma)");
    }
    o.finish();
    return m;
}

InitialSpec parse_initial(const json& j, const std::filesystem::path& base)
{
    Obj o(j, "initial");
    InitialSpec s;
    s.type = o.string("type");
    if (s.type == "constant") {
        const json& v = o.at("value");
        if (v.is_number())
            s.values = {v.get<double>()};
        else
            s.values = o.numbers("value");
        if (s.values.empty())
            o.fail("'value' must not be empty");
    } else if (s.type == "file") {
        Obj f(o.at("files"), "initial.files");
        const json& files = o.at("files");
        for (auto it = files.begin(); it != files.end(); ++it) {
            auto path = resolve(base, f.string(it.key()));
            require_file(path, f);
            s.files[it.key()] = path;
        }
        if (s.files.empty())
            f.fail("no component files given");
        f.finish();
    } else if (s.type != "zero" && s.type != "allen_cahn_gaussians" && s.type != "resting") {
        o.fail("unknown initial type '" + s.type + "'");
    }
    if (o.has("stimuli")) {
        const json& list = o.at("stimuli");
        if (!list.is_array())
            o.fail("'stimuli' must be an array");
        for (std::size_t k = 0; k < list.size(); ++k) {
            Obj st(list[k], "initial.stimuli[" + std::to_string(k) + "]");
            auto r = st.numbers("rect", 4);
            if (!(r[0] < r[1] && r[2] < r[3]))
                st.fail("'rect' must be [x_min, x_max, y_min, y_max] with min < max");
            StimulusSpec stim{{r[0], r[1], r[2], r[3]}, 1.0, "u"};
            stim.value = st.number_or("value", 1.0);
            if (st.has("component"))
                stim.component = st.string("component");
            st.finish();
            s.stimuli.push_back(stim);
        }
    }
    o.finish();
    return s;
}

OutputSpec parse_output(const json& j)
{
    Obj o(j, "output");
    OutputSpec s;
    if (o.has("csv"))
        s.csv = o.boolean("csv");
    if (o.has("pgm"))
        s.pgm = o.boolean("pgm");
    if (o.has("components")) {
        const json& v = o.at("components");
        if (!v.is_array())
            o.fail("'components' must be an array of names");
        for (const auto& c : v) {
            if (!c.is_string())
                o.fail("'components' must be an array of names");
            s.components.push_back(c.get<std::string>());
        }
    }
    o.finish();
    return s;
}

json shape_to_json(const std::string& text) { return json::parse(text); }

} // namespace

Domain GeometrySpec::build() const
{
    if (!preset.empty())
        return presets::by_name(preset);
    if (!shape_json.empty())
        return parse_shape(json::parse(shape_json), "geometry.shape");
    return load_mask(mask_path, mask_origin_x, mask_origin_y, mask_pixel_size);
}

ReactionModel ModelSpec::build() const
{
    if (type == "heat")
        return heat_with_source(D, cx, cy);
    if (type == "allen_cahn")
        return allen_cahn(eps);
    if (type == "fenton_karma")
        return fenton_karma(fk);
    throw ConfigError("unknown model type '" + type + "'");
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    Obj o(j, "");
    RunConfig c;
    c.geometry = parse_geometry(o.at("geometry"), base_dir);
    c.xi = o.number("xi");
    if (!(c.xi > 0.0))
        o.fail("'xi' must be positive");

    if (o.has("N") && o.has("eta"))
        o.fail("give either 'N' or 'eta', not both");
    if (!o.has("N") && !o.has("eta"))
        o.fail("one of 'N' or 'eta' is required");
    if (o.has("N")) {
        const long n = o.integer("N");
        if (n < 8 || n % 2 != 0 || n > 1 << 15)
            o.fail("'N' must be an even integer >= 8");
        c.N = static_cast<int>(n);
    } else {
        c.eta = o.number("eta");
        if (!(*c.eta > 0.0))
            o.fail("'eta' must be positive");
    }

    c.model = parse_model(o.at("model"));
    if (o.has("dt")) {
        c.dt = o.number("dt");
        if (!(*c.dt > 0.0))
            o.fail("'dt' must be positive");
    }
    c.t_end = o.number("t_end");
    if (!(c.t_end >= 0.0))
        o.fail("'t_end' must be non-negative");
    if (o.has("snapshot_every")) {
        const long s = o.integer("snapshot_every");
        if (s < 1 || s > 1L << 40)
            o.fail("'snapshot_every' must be a positive step count");
        c.snapshot_every = static_cast<int>(std::min<long>(s, 1L << 30));
    }
    if (o.has("output_dir"))
        c.output_dir = resolve(base_dir, o.string("output_dir"));
    else
        c.output_dir = resolve(base_dir, "output");
    if (o.has("initial"))
        c.initial = parse_initial(o.at("initial"), base_dir);
    if (o.has("output"))
        c.output = parse_output(o.at("output"));
    if (o.has("scheme")) {
        const std::string s = o.string("scheme");
        if (s == "strang")
            c.scheme = Scheme::strang;
        else if (s == "euler")
            c.scheme = Scheme::euler;
        else
            o.fail("'scheme' must be 'strang' or 'euler'");
    }
    o.finish();

    // Cross-checks that need the model.
    const ReactionModel model = c.model.build();
    for (const auto& st : c.initial.stimuli)
        if (std::find(model.names.begin(), model.names.end(), st.component) == model.names.end())
            throw ConfigError("initial.stimuli: unknown component '" + st.component + "'");
    for (const auto& [name, path] : c.initial.files)
        if (std::find(model.names.begin(), model.names.end(), name) == model.names.end())
            throw ConfigError("initial.files: unknown component '" + name + "'");
    if (c.initial.type == "constant" && c.initial.values.size() != 1 && c.initial.values.size() != model.names.size())
        throw ConfigError("initial.value: need one value or one per component");
    for (const auto& name : c.output.components)
        if (std::find(model.names.begin(), model.names.end(), name) == model.names.end())
            throw ConfigError("output.components: unknown component '" + name + "'");
    return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.has_parent_path() ? path.parent_path() : std::filesystem::path("."));
}

std::string to_json(const RunConfig& c, int indent)
{
    json j;
    json g;
    if (!c.geometry.preset.empty())
        g["preset"] = c.geometry.preset;
    else if (!c.geometry.shape_json.empty())
        g["shape"] = shape_to_json(c.geometry.shape_json);
    else
        g["mask"] = {{"path", c.geometry.mask_path.string()},
                     {"origin", {c.geometry.mask_origin_x, c.geometry.mask_origin_y}},
                     {"pixel_size", c.geometry.mask_pixel_size}};
    j["geometry"] = g;
    j["xi"] = c.xi;
    if (c.N)
        j["N"] = *c.N;
    if (c.eta)
        j["eta"] = *c.eta;

    json m;
    m["type"] = c.model.type;
    if (c.model.type == "heat") {
        m["D"] = c.model.D;
        m["center"] = {c.model.cx, c.model.cy};
    } else if (c.model.type == "allen_cahn") {
        m["eps"] = c.model.eps;
    } else {
        const auto& p = c.model.fk;
        m["tau_d"] = p.tau_d;
        m["tau_r"] = p.tau_r;
        m["tau_si"] = p.tau_si;
        m["tau_0"] = p.tau_0;
        m["tau_v_plus"] = p.tau_v_plus;
        m["tau_v1_minus"] = p.tau_v1_minus;
        m["tau_v2_minus"] = p.tau_v2_minus;
        m["tau_w_plus"] = p.tau_w_plus;
        m["tau_w_minus"] = p.tau_w_minus;
        m["u_c"] = p.u_c;
        m["u_v"] = p.u_v;
        m["u_c_si"] = p.u_c_si;
        m["k"] = p.k;
        m["D"] = p.D;
    }
    j["model"] = m;
    if (c.dt)
        j["dt"] = *c.dt;
    j["t_end"] = c.t_end;
    j["snapshot_every"] = c.snapshot_every;
    j["output_dir"] = c.output_dir.string();

    json ini;
    ini["type"] = c.initial.type;
    if (c.initial.type == "constant")
        ini["value"] = c.initial.values;
    if (c.initial.type == "file") {
        json f = json::object();
        for (const auto& [name, path] : c.initial.files)
            f[name] = path.string();
        ini["files"] = f;
    }
    if (!c.initial.stimuli.empty()) {
        json list = json::array();
        for (const auto& s : c.initial.stimuli)
            list.push_back({{"rect", {s.region.x_min, s.region.x_max, s.region.y_min, s.region.y_max}},
                            {"value", s.value},
                            {"component", s.component}});
        ini["stimuli"] = list;
    }
    j["initial"] = ini;
    j["output"] = {{"csv", c.output.csv}, {"pgm", c.output.pgm}, {"components", c.output.components}};
    j["scheme"] = c.scheme == Scheme::strang ? "strang" : "euler";
    return j.dump(indent);
}

int resolved_resolution(const RunConfig& config, const Box& box)
{
    if (config.N)
        return *config.N;
    return resolution_for_eta(box, config.xi, *config.eta);
}

} // namespace ssb
