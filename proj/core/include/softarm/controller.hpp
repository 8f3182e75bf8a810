#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "softarm/rod.hpp"

namespace softarm {

struct GainCoefficients {
    double g_p1 = 100.0;
    double g_p2 = 50.0;
    double g_v1 = 1.0;
    double g_v2 = 1.0;

    // Tuned values for the two-segment arm; segments past the second reuse
    // the second segment's set.
    static GainCoefficients defaults(std::size_t segment);

    bool operator==(const GainCoefficients&) const = default;
};

struct GainSet {
    Diag3 K_p1, K_v1, K_m1;   // translational (v) channel
    Diag3 K_p2, K_v2, K_m2;   // rotational (u) channel
    GainCoefficients coefficients;
};

// Reference strains and their first two time derivatives at one point.
struct ReferenceSample {
    Vec3 v = Vec3(0.0, 0.0, 1.0);
    Vec3 v_t = Vec3::Zero();
    Vec3 v_tt = Vec3::Zero();
    Vec3 u = Vec3::Zero();
    Vec3 u_t = Vec3::Zero();
    Vec3 u_tt = Vec3::Zero();
};

// Time- and arc-length-dependent reference with analytic derivatives.
using ReferenceSignal = std::function<ReferenceSample(double t, std::size_t seg, double s)>;

struct ConfigurationState {
    Vec3 v = Vec3(0.0, 0.0, 1.0);
    Vec3 u = Vec3::Zero();
    Vec3 v_t = Vec3::Zero();
    Vec3 u_t = Vec3::Zero();
};

struct ErrorDynamics {
    Mat6 K_v;   // K'_v
    Mat6 K_p;   // K'_p
};

struct ErrorSample {
    double t;
    Vec6 e;
    Vec6 e_t;
    double V;
};

GainSet build_gains(const MaterialParams& params, const StiffnessSet& stiff,
                    const GainCoefficients& coefficients);

// Configuration-space command before it is rotated into the global frame:
// c_v = K_p1(v_ref - v) + K_v1(v_ref_t - v_t) + K_m1 v_ref_tt, likewise c_u.
struct ConfigurationCommand {
    Vec3 c_v;
    Vec3 c_u;
};

ConfigurationCommand configuration_command(const ReferenceSample& ref,
                                           const ConfigurationState& state, const GainSet& gains);

Wrench control_wrench(const ReferenceSample& ref, const ConfigurationState& state, const Mat3& R,
                      const GainSet& gains, const MaterialParams& params);

ErrorDynamics assemble_error_dynamics(const GainSet& gains);

double lyapunov_value(const Vec6& e, const Vec6& e_t, const ErrorDynamics& dyn);
double lyapunov_rate(const Vec6& e_t, const ErrorDynamics& dyn);

std::vector<ErrorSample> simulate_error_ode(const Vec6& e0, const Vec6& e0_t,
                                            const ErrorDynamics& dyn, double dt, double T);

// Implicit one-step prediction of the closed loop in configuration space.
// The controller's internal model integrates K_m x_tt = command with the
// same BDF scheme as the rod. Position history comes from measurements,
// rate history from the model itself.
struct PredictionHistory {
    double c0 = 0.0;
    Vec6 x_h = Vec6::Zero();     // from measured (v, u)
    Vec6 x_th = Vec6::Zero();    // from the model's previous rates
};

struct Prediction {
    ConfigurationState state;    // predicted (v, u) and BDF rates
    ConfigurationCommand command;
};

Prediction predict_configuration(const ReferenceSample& ref, const PredictionHistory& hist,
                                 const GainSet& gains);

} // namespace softarm
