#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "softarm/actuation.hpp"
#include "softarm/bvp.hpp"
#include "softarm/controller.hpp"
#include "softarm/pcc.hpp"

namespace softarm {

enum class ScenarioKind { Extension, Bending, Custom };

// Every built-in reference has the form x_ref = x_rest + amp * sin^2(omega t)
// per strain component. Amplitudes are dimensionless for v and 1/m for u.
struct ScenarioConfig {
    int segments = 2;
    double dt = 0.05;           // s
    double duration = 150.0;    // s
    int nodes_per_segment = 10;

    ScenarioKind kind = ScenarioKind::Extension;
    double a = 0.1;             // extension amplitude, both segments
    double b = 1.5;             // segment 1 curvature about x (1/m)
    double c = -3.0;            // segment 2 curvature about y (1/m)
    double omega = 2.0 * std::numbers::pi / 100.0;   // rad/s
    // Custom scenarios: per segment (v_x, v_y, v_z, u_x, u_y, u_z) amplitudes.
    std::vector<std::array<double, 6>> amplitudes;

    double lag = 0.0;           // s, pneumatic regulator time constant
    ArcLengthMode pcc_mode = ArcLengthMode::Geometric;
    std::vector<GainCoefficients> gains;   // empty: tuned defaults
    std::string output;
    std::uint64_t seed = 0;
    double noise_sigma = 0.0;   // m, tip position noise of the virtual measurement
    bool gravity = true;
    bool estimator = true;      // run the rod solve every step
    int log_every = 1;          // keep every k-th time step in the log

    MaterialParams material;
    PressureLimits limits;
    ShootingConfig shooting;

    static ScenarioConfig extension();
    static ScenarioConfig bending();

    GainCoefficients gain(std::size_t segment) const;
    MaterialParams segment_params() const;   // material with gravity applied
    long step_count() const;

    bool operator==(const ScenarioConfig&) const = default;
};

struct ScalarReference {
    double x;
    double x_t;
    double x_tt;
};

// amp * sin^2(omega t) and its analytic time derivatives.
ScalarReference sin_squared(double t, double amp, double omega);

// v_z reference shared by every segment.
ScalarReference reference_extension(double t, double a, double omega);

struct BendingReference {
    ScalarReference u_x_seg1;
    ScalarReference u_y_seg2;
};

BendingReference reference_bending(double t, double b, double c, double omega);

// Per segment amplitude vectors implied by the scenario kind.
std::vector<std::array<double, 6>> scenario_amplitudes(const ScenarioConfig& cfg);

ReferenceSignal make_reference(const ScenarioConfig& cfg);

// Throws ConfigError naming the offending field.
void validate_config(const ScenarioConfig& cfg);

std::string emit_config(const ScenarioConfig& cfg);
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);
void save_config(const ScenarioConfig& cfg, const std::filesystem::path& path);

const char* to_string(ScenarioKind kind);
const char* to_string(ArcLengthMode mode);
ArcLengthMode parse_arc_length_mode(const std::string& s);

} // namespace softarm
