#include "softarm/controller.hpp"

#include <cmath>

#include "softarm/actuation.hpp"
#include "softarm/errors.hpp"

namespace softarm {

GainCoefficients GainCoefficients::defaults(std::size_t segment)
{
    if (segment == 0) {
        return {100.0, 50.0, 1.0, 1.0};
    }
    return {37.5, 18.75, 1.0, 1.0};
}

GainSet build_gains(const MaterialParams& params, const StiffnessSet& stiff,
                    const GainCoefficients& c)
{
    auto finite = [](double x) { return std::isfinite(x); };
    if (!finite(c.g_p1) || !finite(c.g_p2) || !(c.g_p1 > 0.0) || !(c.g_p2 > 0.0)) {
        throw InvalidGain("proportional gain coefficients must be positive");
    }
    if (!finite(c.g_v1) || !finite(c.g_v2) || c.g_v1 < 0.0 || c.g_v2 < 0.0) {
        throw InvalidGain("damping gain coefficients must be nonnegative");
    }
    GainSet g;
    g.coefficients = c;
    g.K_p1 = Diag3(c.g_p1 * stiff.K_se.diagonal());
    g.K_v1 = Diag3(c.g_v1 * stiff.B_se.diagonal());
    g.K_p2 = Diag3(c.g_p2 * stiff.K_bt.diagonal());
    g.K_v2 = Diag3(c.g_v2 * stiff.B_bt.diagonal());
    g.K_m1 = Diag3(Vec3::Constant(weight_per_length(params)));
    g.K_m2 = Diag3(params.rho * params.second_moment());
    return g;
}

ConfigurationCommand configuration_command(const ReferenceSample& ref,
                                           const ConfigurationState& state, const GainSet& gains)
{
    return {gains.K_p1 * (ref.v - state.v) + gains.K_v1 * (ref.v_t - state.v_t)
                + gains.K_m1 * ref.v_tt,
            gains.K_p2 * (ref.u - state.u) + gains.K_v2 * (ref.u_t - state.u_t)
                + gains.K_m2 * ref.u_tt};
}

Wrench control_wrench(const ReferenceSample& ref, const ConfigurationState& state, const Mat3& R,
                      const GainSet& gains, const MaterialParams& params)
{
    const ConfigurationCommand c = configuration_command(ref, state, gains);
    return {R * c.c_v - gravity_load(params).f, R * c.c_u};
}

ErrorDynamics assemble_error_dynamics(const GainSet& gains)
{
    Vec6 km;
    km << gains.K_m1.diagonal(), gains.K_m2.diagonal();
    for (int i = 0; i < 6; ++i) {
        if (!(km[i] != 0.0) || !std::isfinite(km[i])) {
            throw DivisionError("inertia gain has a zero diagonal entry");
        }
    }
    Vec6 kv;
    Vec6 kp;
    kv << gains.K_v1.diagonal(), gains.K_v2.diagonal();
    kp << gains.K_p1.diagonal(), gains.K_p2.diagonal();
    ErrorDynamics d;
    d.K_v = kv.cwiseQuotient(km).asDiagonal();
    d.K_p = kp.cwiseQuotient(km).asDiagonal();
    return d;
}

double lyapunov_value(const Vec6& e, const Vec6& e_t, const ErrorDynamics& dyn)
{
    return 0.5 * e_t.dot(e_t) + 0.5 * e.dot(dyn.K_p * e);
}

double lyapunov_rate(const Vec6& e_t, const ErrorDynamics& dyn)
{
    return -e_t.dot(dyn.K_v * e_t);
}

std::vector<ErrorSample> simulate_error_ode(const Vec6& e0, const Vec6& e0_t,
                                            const ErrorDynamics& dyn, double dt, double T)
{
    if (!(dt > 0.0) || !(T > 0.0)) {
        throw InvalidStep("time step and horizon must be positive");
    }
    auto accel = [&dyn](const Vec6& e, const Vec6& e_t) -> Vec6 {
        return -dyn.K_v * e_t - dyn.K_p * e;
    };
    const auto steps = static_cast<long>(std::ceil(T / dt - 1e-9));
    std::vector<ErrorSample> out;
    out.reserve(static_cast<std::size_t>(steps) + 1);
    Vec6 e = e0;
    Vec6 et = e0_t;
    out.push_back({0.0, e, et, lyapunov_value(e, et, dyn)});
    for (long i = 1; i <= steps; ++i) {
        const Vec6 k1x = et;
        const Vec6 k1v = accel(e, et);
        const Vec6 k2x = et + 0.5 * dt * k1v;
        const Vec6 k2v = accel(e + 0.5 * dt * k1x, k2x);
        const Vec6 k3x = et + 0.5 * dt * k2v;
        const Vec6 k3v = accel(e + 0.5 * dt * k2x, k3x);
        const Vec6 k4x = et + dt * k3v;
        const Vec6 k4v = accel(e + dt * k3x, k4x);
        e += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        et += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        out.push_back({i * dt, e, et, lyapunov_value(e, et, dyn)});
    }
    return out;
}

Prediction predict_configuration(const ReferenceSample& ref, const PredictionHistory& hist,
                                 const GainSet& gains)
{
    Vec6 kp, kv, km, x_ref, x_ref_t, x_ref_tt;
    kp << gains.K_p1.diagonal(), gains.K_p2.diagonal();
    kv << gains.K_v1.diagonal(), gains.K_v2.diagonal();
    km << gains.K_m1.diagonal(), gains.K_m2.diagonal();
    x_ref << ref.v, ref.u;
    x_ref_t << ref.v_t, ref.u_t;
    x_ref_tt << ref.v_tt, ref.u_tt;

    const double c0 = hist.c0;
    Vec6 x;
    for (int i = 0; i < 6; ++i) {
        const double num = kp[i] * x_ref[i] + kv[i] * (x_ref_t[i] - hist.x_h[i])
            + km[i] * (x_ref_tt[i] - c0 * hist.x_h[i] - hist.x_th[i]);
        x[i] = num / (km[i] * c0 * c0 + kv[i] * c0 + kp[i]);
    }
    const Vec6 x_t = c0 * x + hist.x_h;

    Prediction out;
    out.state.v = x.head<3>();
    out.state.u = x.tail<3>();
    out.state.v_t = x_t.head<3>();
    out.state.u_t = x_t.tail<3>();
    out.command = configuration_command(ref, out.state, gains);
    return out;
}

} // namespace softarm
