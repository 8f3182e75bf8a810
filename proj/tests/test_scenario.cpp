#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "softarm/errors.hpp"
#include "softarm/tracking.hpp"

using namespace softarm;

namespace {

constexpr double kPi = std::numbers::pi;

ConfigError config_error_of(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e;
    }
    ADD_FAILURE() << "expected ConfigError";
    return ConfigError("");
}

} // namespace

TEST(ReferenceExtension, Examples)
{
    EXPECT_EQ(reference_extension(0.0, 0.1, 2.0 * kPi / 100.0).x, 1.0);
    EXPECT_NEAR(reference_extension(25.0, 0.1, 2.0 * kPi / 100.0).x, 1.1, 1e-15);
}

TEST(ReferenceExtension, DerivativesMatchFiniteDifferences)
{
    const double a = 0.1;
    const double w = 2.0 * kPi / 100.0;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> t_dist(0.0, 150.0);
    for (int i = 0; i < 20; ++i) {
        const double t = t_dist(rng);
        const ScalarReference r = reference_extension(t, a, w);
        const double dx = oracle::central_difference([&](double s) { return reference_extension(s, a, w).x; }, t, 1e-4);
        const double dxt = oracle::central_difference([&](double s) { return reference_extension(s, a, w).x_t; }, t, 1e-4);
        EXPECT_NEAR(r.x_t, dx, 1e-8);
        EXPECT_NEAR(r.x_tt, dxt, 1e-8);
    }
}

TEST(ReferenceBending, ExamplesAndSignRelation)
{
    const double w = 2.0 * kPi / 50.0;
    const BendingReference zero = reference_bending(0.0, 1.5, -3.0, w);
    EXPECT_EQ(zero.u_x_seg1.x, 0.0);
    EXPECT_EQ(zero.u_y_seg2.x, 0.0);
    const BendingReference peak = reference_bending(12.5, 1.5, -3.0, w);
    EXPECT_NEAR(peak.u_x_seg1.x, 1.5, 1e-14);
    EXPECT_NEAR(peak.u_y_seg2.x, -3.0, 1e-14);
    for (double t : {1.0, 7.3, 20.0, 41.9}) {
        const BendingReference r = reference_bending(t, 1.5, -3.0, w);
        EXPECT_NEAR(r.u_y_seg2.x / r.u_x_seg1.x, -2.0, 1e-14);
    }
}

TEST(ReferenceBending, DerivativesMatchFiniteDifferences)
{
    const double w = 2.0 * kPi / 50.0;
    for (double t : {0.7, 13.1, 33.3, 149.0}) {
        const BendingReference r = reference_bending(t, 1.5, -3.0, w);
        auto ux = [&](double s) { return reference_bending(s, 1.5, -3.0, w).u_y_seg2.x; };
        auto uxt = [&](double s) { return reference_bending(s, 1.5, -3.0, w).u_y_seg2.x_t; };
        EXPECT_NEAR(r.u_y_seg2.x_t, oracle::central_difference(ux, t, 1e-4), 1e-8);
        EXPECT_NEAR(r.u_y_seg2.x_tt, oracle::central_difference(uxt, t, 1e-4), 1e-8);
    }
}

TEST(MakeReference, BendingScenarioPerSegment)
{
    const ScenarioConfig cfg = ScenarioConfig::bending();
    const ReferenceSignal ref = make_reference(cfg);
    const ReferenceSample s1 = ref(12.5, 0, 0.1);
    const ReferenceSample s2 = ref(12.5, 1, 0.1);
    EXPECT_NEAR(s1.u.x(), 1.5, 1e-14);
    EXPECT_EQ(s1.u.y(), 0.0);
    EXPECT_NEAR(s2.u.y(), -3.0, 1e-14);
    EXPECT_EQ(s2.u.x(), 0.0);
    EXPECT_EQ(s1.v, Vec3(0.0, 0.0, 1.0));
}

TEST(MakeReference, ExtensionDrivesBothSegments)
{
    const ReferenceSignal ref = make_reference(ScenarioConfig::extension());
    EXPECT_NEAR(ref(25.0, 0, 0.0).v.z(), 1.1, 1e-15);
    EXPECT_NEAR(ref(25.0, 1, 0.185).v.z(), 1.1, 1e-15);
    EXPECT_EQ(ref(25.0, 1, 0.0).u, Vec3::Zero());
}

TEST(Config, DefaultRoundTrip)
{
    for (const ScenarioConfig& cfg : {ScenarioConfig::extension(), ScenarioConfig::bending()}) {
        EXPECT_EQ(parse_config(emit_config(cfg)), cfg);
    }
}

TEST(Config, NonDefaultRoundTrip)
{
    ScenarioConfig cfg = ScenarioConfig::bending();
    cfg.kind = ScenarioKind::Custom;
    cfg.amplitudes = {{0.0, 0.0, 0.05, 0.3, 0.0, 0.0}, {0.0, 0.0, 0.0, 0.0, -1.0 / 3.0, 0.0}};
    cfg.gains = {{90.0, 40.0, 0.5, 0.25}, {30.0, 15.0, 1.0, 1.0}};
    cfg.lag = 0.7;
    cfg.pcc_mode = ArcLengthMode::PaperVerbatim;
    cfg.noise_sigma = 1e-4;
    cfg.seed = 1234567890123ull;
    cfg.gravity = false;
    cfg.material.tau = 0.01;
    cfg.material.E = 0.1 + 0.2;
    cfg.limits.p_max = 25.0 * kPsi;
    cfg.shooting.max_iters = 20;
    cfg.output = "out/run.csv";
    EXPECT_EQ(parse_config(emit_config(cfg)), cfg);
}

TEST(Config, FileRoundTrip)
{
    const auto path = std::filesystem::temp_directory_path() / "softarm_cfg_roundtrip.json";
    const ScenarioConfig cfg = ScenarioConfig::bending();
    save_config(cfg, path);
    EXPECT_EQ(load_config(path), cfg);
    std::filesystem::remove(path);
    EXPECT_THROW(load_config(path), IoError);
}

TEST(Config, MalformedNumericFieldIsNamed)
{
    nlohmann::json j = nlohmann::json::parse(emit_config(ScenarioConfig{}));
    j["dt"] = "fast";
    EXPECT_EQ(config_error_of(j.dump()).field, "dt");
    j = nlohmann::json::parse(emit_config(ScenarioConfig{}));
    j["material"]["E"] = "stiff";
    EXPECT_EQ(config_error_of(j.dump()).field, "material.E");
    j = nlohmann::json::parse(emit_config(ScenarioConfig{}));
    j["scenario"]["omega"] = nullptr;
    EXPECT_EQ(config_error_of(j.dump()).field, "scenario.omega");
}

TEST(Config, UnknownKeyAndInvalidValues)
{
    nlohmann::json j = nlohmann::json::parse(emit_config(ScenarioConfig{}));
    j["dtt"] = 0.1;
    EXPECT_EQ(config_error_of(j.dump()).field, "dtt");

    j = nlohmann::json::parse(emit_config(ScenarioConfig{}));
    j["dt"] = -0.05;
    EXPECT_EQ(config_error_of(j.dump()).field, "dt");

    j = nlohmann::json::parse(emit_config(ScenarioConfig{}));
    j["lag"] = -1.0;
    EXPECT_EQ(config_error_of(j.dump()).field, "lag");

    j = nlohmann::json::parse(emit_config(ScenarioConfig{}));
    j["pcc_mode"] = "sideways";
    EXPECT_EQ(config_error_of(j.dump()).field, "pcc_mode");

    EXPECT_THROW(parse_config("{ not json"), ConfigError);
}

TEST(Config, MinimalDocumentUsesDefaults)
{
    EXPECT_EQ(parse_config("{}"), ScenarioConfig{});
    const ScenarioConfig b = parse_config(R"({"scenario": {"kind": "bending"}})");
    EXPECT_EQ(b.kind, ScenarioKind::Bending);
    EXPECT_DOUBLE_EQ(b.omega, 2.0 * kPi / 50.0);
}

TEST(Config, ValidateRejectsBadGains)
{
    ScenarioConfig cfg;
    cfg.gains = {{0.0, 1.0, 1.0, 1.0}, {1.0, 1.0, 1.0, 1.0}};
    try {
        validate_config(cfg);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field.rfind("gains", 0), 0u);
    }
    cfg.gains = {{1.0, 1.0, 1.0, 1.0}};
    EXPECT_THROW(validate_config(cfg), ConfigError);
}

TEST(Rmse, Cases)
{
    const std::vector<double> a{0.3, -1.0, 2.0};
    EXPECT_EQ(rmse(a, a), 0.0);
    const std::vector<double> shifted{1.3, 0.0, 3.0};
    EXPECT_NEAR(rmse(shifted, a), 1.0, 1e-15);
    const std::vector<double> two{0.0, 2.0};
    const std::vector<double> zero{0.0, 0.0};
    EXPECT_NEAR(rmse(two, zero), std::sqrt(2.0), 1e-15);
    EXPECT_THROW(rmse(std::vector<double>{}, std::vector<double>{}), InvalidParams);
    EXPECT_THROW(rmse(two, a), InvalidParams);
}

TEST(LogIo, SingleRowHasHeaderAndOneLine)
{
    TrajectoryLog log;
    LogRow r;
    r.t = 0.05;
    r.u = Vec3(0.1, -0.2, 1.0 / 3.0);
    r.residual = 1.25e-11;
    r.p_d = {6894.757293168361, 1.0, 2.0, 3.0};
    log.rows.push_back(r);
    std::stringstream ss;
    write_log(log, ss);
    const std::string text = ss.str();
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
    EXPECT_EQ(text.substr(0, text.find('\n')), kLogHeader);
    EXPECT_EQ(read_log(ss).rows, log.rows);
}

TEST(LogIo, MalformedFieldIsNamedWithRow)
{
    TrajectoryLog log;
    log.rows.resize(2);
    std::stringstream body;
    write_log(log, body);
    std::string text = body.str();
    const auto second = text.find('\n', text.find('\n') + 1) + 1;
    text.replace(second, 1, "x");
    std::stringstream in(text);
    try {
        read_log(in);
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field, "t");
        EXPECT_EQ(e.row, 2u);
    }
}

TEST(LogIo, WrongHeaderRejected)
{
    std::stringstream in("t,seg,node\n0,1,0\n");
    EXPECT_THROW(read_log(in), ConfigError);
}
