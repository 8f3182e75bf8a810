#include "softarm/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "softarm/errors.hpp"

namespace softarm {

using nlohmann::json;

ScenarioConfig ScenarioConfig::extension()
{
    return {};
}

ScenarioConfig ScenarioConfig::bending()
{
    ScenarioConfig cfg;
    cfg.kind = ScenarioKind::Bending;
    cfg.omega = 2.0 * std::numbers::pi / 50.0;
    return cfg;
}

GainCoefficients ScenarioConfig::gain(std::size_t segment) const
{
    return gains.empty() ? GainCoefficients::defaults(segment) : gains.at(segment);
}

MaterialParams ScenarioConfig::segment_params() const
{
    MaterialParams p = material;
    if (!gravity) {
        p.g = Vec3::Zero();
    }
    return p;
}

long ScenarioConfig::step_count() const
{
    return std::lround(duration / dt);
}

ScalarReference sin_squared(double t, double amp, double omega)
{
    const double s = std::sin(omega * t);
    return {amp * s * s, amp * omega * std::sin(2.0 * omega * t),
            2.0 * amp * omega * omega * std::cos(2.0 * omega * t)};
}

ScalarReference reference_extension(double t, double a, double omega)
{
    ScalarReference r = sin_squared(t, a, omega);
    r.x += 1.0;
    return r;
}

BendingReference reference_bending(double t, double b, double c, double omega)
{
    return {sin_squared(t, b, omega), sin_squared(t, c, omega)};
}

std::vector<std::array<double, 6>> scenario_amplitudes(const ScenarioConfig& cfg)
{
    std::vector<std::array<double, 6>> amp(static_cast<std::size_t>(std::max(cfg.segments, 0)),
                                           std::array<double, 6>{});
    switch (cfg.kind) {
    case ScenarioKind::Extension:
        for (auto& a : amp) {
            a[2] = cfg.a;
        }
        break;
    case ScenarioKind::Bending:
        if (!amp.empty()) {
            amp[0][3] = cfg.b;
        }
        if (amp.size() > 1) {
            amp[1][4] = cfg.c;
        }
        break;
    case ScenarioKind::Custom:
        amp = cfg.amplitudes;
        break;
    }
    return amp;
}

ReferenceSignal make_reference(const ScenarioConfig& cfg)
{
    const MaterialParams params = cfg.segment_params();
    Vec6 rest;
    rest << params.v_star, params.u_star;
    return [amp = scenario_amplitudes(cfg), rest, omega = cfg.omega](double t, std::size_t seg,
                                                                     double) {
        ReferenceSample r;
        Vec6 x, x_t, x_tt;
        for (int i = 0; i < 6; ++i) {
            const ScalarReference s = sin_squared(t, amp[seg][i], omega);
            x[i] = rest[i] + s.x;
            x_t[i] = s.x_t;
            x_tt[i] = s.x_tt;
        }
        r.v = x.head<3>();
        r.u = x.tail<3>();
        r.v_t = x_t.head<3>();
        r.u_t = x_t.tail<3>();
        r.v_tt = x_tt.head<3>();
        r.u_tt = x_tt.tail<3>();
        return r;
    };
}

namespace {

void require(bool ok, const std::string& field, const std::string& what)
{
    if (!ok) {
        throw ConfigError(field + ": " + what, field);
    }
}

bool finite_positive(double x)
{
    return std::isfinite(x) && x > 0.0;
}

} // namespace

void validate_config(const ScenarioConfig& cfg)
{
    require(cfg.segments >= 1, "segments", "must be at least 1");
    require(finite_positive(cfg.dt), "dt", "must be positive");
    require(finite_positive(cfg.duration), "duration", "must be positive");
    require(cfg.nodes_per_segment >= 1, "nodes_per_segment", "must be at least 1");
    require(std::isfinite(cfg.a) && std::isfinite(cfg.b) && std::isfinite(cfg.c),
            "scenario", "amplitudes must be finite");
    require(std::isfinite(cfg.omega), "scenario.omega", "must be finite");
    if (cfg.kind == ScenarioKind::Custom) {
        require(cfg.amplitudes.size() == static_cast<std::size_t>(cfg.segments),
                "scenario.amplitudes", "needs one entry per segment");
        for (const auto& a : cfg.amplitudes) {
            for (double x : a) {
                require(std::isfinite(x), "scenario.amplitudes", "must be finite");
            }
        }
    }
    require(std::isfinite(cfg.lag) && cfg.lag >= 0.0, "lag", "must be nonnegative");
    require(cfg.gains.empty() || cfg.gains.size() == static_cast<std::size_t>(cfg.segments),
            "gains", "needs one entry per segment");
    for (const auto& g : cfg.gains) {
        require(finite_positive(g.g_p1) && finite_positive(g.g_p2), "gains",
                "g_p1 and g_p2 must be positive");
        require(std::isfinite(g.g_v1) && std::isfinite(g.g_v2) && g.g_v1 >= 0.0 && g.g_v2 >= 0.0,
                "gains", "g_v1 and g_v2 must be nonnegative");
    }
    require(std::isfinite(cfg.noise_sigma) && cfg.noise_sigma >= 0.0, "noise_sigma",
            "must be nonnegative");
    require(cfg.log_every >= 1, "log_every", "must be at least 1");
    require(std::isfinite(cfg.limits.p_min) && std::isfinite(cfg.limits.p_max)
                && cfg.limits.p_min >= 0.0 && cfg.limits.p_max > cfg.limits.p_min,
            "pressure_limits", "need 0 <= p_min < p_max");
    require(finite_positive(cfg.shooting.residual_tol), "shooting.residual_tol",
            "must be positive");
    require(cfg.shooting.max_iters >= 1, "shooting.max_iters", "must be at least 1");
    require(finite_positive(cfg.shooting.fd_epsilon), "shooting.fd_epsilon", "must be positive");
    require(cfg.shooting.max_halvings >= 0, "shooting.max_halvings", "must be nonnegative");
    try {
        cfg.material.validate();
    } catch (const InvalidParams& e) {
        throw ConfigError(std::string("material: ") + e.what(), "material");
    }
}

const char* to_string(ScenarioKind kind)
{
    switch (kind) {
    case ScenarioKind::Extension:
        return "extension";
    case ScenarioKind::Bending:
        return "bending";
    case ScenarioKind::Custom:
        return "custom";
    }
    return "extension";
}

const char* to_string(ArcLengthMode mode)
{
    return mode == ArcLengthMode::Geometric ? "geometric" : "paper-verbatim";
}

ArcLengthMode parse_arc_length_mode(const std::string& s)
{
    if (s == "geometric") {
        return ArcLengthMode::Geometric;
    }
    if (s == "paper-verbatim") {
        return ArcLengthMode::PaperVerbatim;
    }
    throw ConfigError("pcc_mode: expected 'geometric' or 'paper-verbatim'", "pcc_mode");
}

namespace {

ScenarioKind parse_kind(const std::string& s)
{
    if (s == "extension") {
        return ScenarioKind::Extension;
    }
    if (s == "bending") {
        return ScenarioKind::Bending;
    }
    if (s == "custom") {
        return ScenarioKind::Custom;
    }
    throw ConfigError("scenario.kind: expected extension, bending or custom", "scenario.kind");
}

json vec_json(const Vec3& v)
{
    return json::array({v.x(), v.y(), v.z()});
}

// Walks one JSON object, reporting type errors and unknown keys by path.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) {
            throw ConfigError(name("") + ": expected an object", path_);
        }
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!seen_.count(it.key())) {
                throw ConfigError(name(it.key()) + ": unknown key", name(it.key()));
            }
        }
    }

    const json* find(const std::string& key)
    {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    void number(const std::string& key, double& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_number()) {
                throw ConfigError(name(key) + ": expected a number", name(key));
            }
            out = v->get<double>();
        }
    }

    template <class Int>
    void integer(const std::string& key, Int& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_number_integer()) {
                throw ConfigError(name(key) + ": expected an integer", name(key));
            }
            out = v->get<Int>();
        }
    }

    void boolean(const std::string& key, bool& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_boolean()) {
                throw ConfigError(name(key) + ": expected true or false", name(key));
            }
            out = v->get<bool>();
        }
    }

    void string(const std::string& key, std::string& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_string()) {
                throw ConfigError(name(key) + ": expected a string", name(key));
            }
            out = v->get<std::string>();
        }
    }

    void vector3(const std::string& key, Vec3& out)
    {
        if (const json* v = find(key)) {
            if (!v->is_array() || v->size() != 3) {
                throw ConfigError(name(key) + ": expected an array of 3 numbers", name(key));
            }
            for (std::size_t i = 0; i < 3; ++i) {
                if (!(*v)[i].is_number()) {
                    throw ConfigError(name(key) + ": expected an array of 3 numbers", name(key));
                }
                out[static_cast<int>(i)] = (*v)[i].get<double>();
            }
        }
    }

    std::string name(const std::string& key) const
    {
        if (path_.empty()) {
            return key;
        }
        return key.empty() ? path_ : path_ + "." + key;
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

} // namespace

std::string emit_config(const ScenarioConfig& cfg)
{
    json j;
    j["segments"] = cfg.segments;
    j["dt"] = cfg.dt;
    j["duration"] = cfg.duration;
    j["nodes_per_segment"] = cfg.nodes_per_segment;

    json sc;
    sc["kind"] = to_string(cfg.kind);
    sc["a"] = cfg.a;
    sc["b"] = cfg.b;
    sc["c"] = cfg.c;
    sc["omega"] = cfg.omega;
    if (!cfg.amplitudes.empty()) {
        sc["amplitudes"] = cfg.amplitudes;
    }
    j["scenario"] = sc;

    j["lag"] = cfg.lag;
    j["pcc_mode"] = to_string(cfg.pcc_mode);
    if (!cfg.gains.empty()) {
        json gains = json::array();
        for (const auto& g : cfg.gains) {
            gains.push_back({{"g_p1", g.g_p1}, {"g_p2", g.g_p2}, {"g_v1", g.g_v1},
                             {"g_v2", g.g_v2}});
        }
        j["gains"] = gains;
    }
    j["output"] = cfg.output;
    j["seed"] = cfg.seed;
    j["noise_sigma"] = cfg.noise_sigma;
    j["gravity"] = cfg.gravity;
    j["estimator"] = cfg.estimator;
    j["log_every"] = cfg.log_every;

    const MaterialParams& m = cfg.material;
    j["material"] = {{"rho", m.rho},
                     {"r0", m.r0},
                     {"L0", m.L0},
                     {"E", m.E},
                     {"G", m.G},
                     {"alpha_c", m.alpha_c},
                     {"tau", m.tau},
                     {"chamber_area", m.chamber_area},
                     {"chamber_offset", m.chamber_offset},
                     {"g", vec_json(m.g)},
                     {"v_star", vec_json(m.v_star)},
                     {"u_star", vec_json(m.u_star)}};
    j["pressure_limits"] = {{"p_min", cfg.limits.p_min}, {"p_max", cfg.limits.p_max}};
    j["shooting"] = {{"residual_tol", cfg.shooting.residual_tol},
                     {"max_iters", cfg.shooting.max_iters},
                     {"fd_epsilon", cfg.shooting.fd_epsilon},
                     {"max_halvings", cfg.shooting.max_halvings}};
    return j.dump(2) + "\n";
}

ScenarioConfig parse_config(const std::string& text)
{
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }

    ScenarioConfig cfg;
    bool omega_given = false;
    {
        Reader r(j, "");
        r.integer("segments", cfg.segments);
        r.number("dt", cfg.dt);
        r.number("duration", cfg.duration);
        r.integer("nodes_per_segment", cfg.nodes_per_segment);

        if (const json* sc = r.find("scenario")) {
            Reader s(*sc, "scenario");
            std::string kind = to_string(cfg.kind);
            s.string("kind", kind);
            cfg.kind = parse_kind(kind);
            s.number("a", cfg.a);
            s.number("b", cfg.b);
            s.number("c", cfg.c);
            omega_given = s.find("omega") != nullptr;
            s.number("omega", cfg.omega);
            if (const json* amp = s.find("amplitudes")) {
                if (!amp->is_array()) {
                    throw ConfigError("scenario.amplitudes: expected an array",
                                      "scenario.amplitudes");
                }
                for (const auto& row : *amp) {
                    if (!row.is_array() || row.size() != 6) {
                        throw ConfigError("scenario.amplitudes: each entry needs 6 numbers",
                                          "scenario.amplitudes");
                    }
                    std::array<double, 6> a{};
                    for (std::size_t i = 0; i < 6; ++i) {
                        if (!row[i].is_number()) {
                            throw ConfigError("scenario.amplitudes: expected numbers",
                                              "scenario.amplitudes");
                        }
                        a[i] = row[i].get<double>();
                    }
                    cfg.amplitudes.push_back(a);
                }
            }
            s.finish();
        }
        if (!omega_given && cfg.kind == ScenarioKind::Bending) {
            cfg.omega = ScenarioConfig::bending().omega;
        }

        r.number("lag", cfg.lag);
        std::string mode = to_string(cfg.pcc_mode);
        r.string("pcc_mode", mode);
        cfg.pcc_mode = parse_arc_length_mode(mode);

        if (const json* gains = r.find("gains")) {
            if (!gains->is_array()) {
                throw ConfigError("gains: expected an array", "gains");
            }
            for (std::size_t i = 0; i < gains->size(); ++i) {
                GainCoefficients g = GainCoefficients::defaults(i);
                Reader gr((*gains)[i], "gains[" + std::to_string(i) + "]");
                gr.number("g_p1", g.g_p1);
                gr.number("g_p2", g.g_p2);
                gr.number("g_v1", g.g_v1);
                gr.number("g_v2", g.g_v2);
                gr.finish();
                cfg.gains.push_back(g);
            }
        }
        r.string("output", cfg.output);
        r.integer("seed", cfg.seed);
        r.number("noise_sigma", cfg.noise_sigma);
        r.boolean("gravity", cfg.gravity);
        r.boolean("estimator", cfg.estimator);
        r.integer("log_every", cfg.log_every);

        if (const json* mat = r.find("material")) {
            Reader m(*mat, "material");
            MaterialParams& p = cfg.material;
            m.number("rho", p.rho);
            m.number("r0", p.r0);
            m.number("L0", p.L0);
            m.number("E", p.E);
            m.number("G", p.G);
            m.number("alpha_c", p.alpha_c);
            m.number("tau", p.tau);
            m.number("chamber_area", p.chamber_area);
            m.number("chamber_offset", p.chamber_offset);
            m.vector3("g", p.g);
            m.vector3("v_star", p.v_star);
            m.vector3("u_star", p.u_star);
            m.finish();
        }
        if (const json* lim = r.find("pressure_limits")) {
            Reader l(*lim, "pressure_limits");
            l.number("p_min", cfg.limits.p_min);
            l.number("p_max", cfg.limits.p_max);
            l.finish();
        }
        if (const json* sh = r.find("shooting")) {
            Reader s(*sh, "shooting");
            s.number("residual_tol", cfg.shooting.residual_tol);
            s.integer("max_iters", cfg.shooting.max_iters);
            s.number("fd_epsilon", cfg.shooting.fd_epsilon);
            s.integer("max_halvings", cfg.shooting.max_halvings);
            s.finish();
        }
        r.finish();
    }
    validate_config(cfg);
    return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void save_config(const ScenarioConfig& cfg, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write config file " + path.string());
    }
    out << emit_config(cfg);
    if (!out) {
        throw IoError("failed writing config file " + path.string());
    }
}

} // namespace softarm
