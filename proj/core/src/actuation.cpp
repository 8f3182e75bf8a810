#include "softarm/actuation.hpp"

#include <algorithm>
#include <cmath>

#include "softarm/errors.hpp"

namespace softarm {

double weight_per_length(const MaterialParams& params)
{
    return params.rho * params.area();
}

Wrench gravity_load(const MaterialParams& params)
{
    return {weight_per_length(params) * params.g, Vec3::Zero()};
}

Wrench pneumatic_wrench(const ChamberPressures& pressures, const NodeGeometry& geometry,
                        const MaterialParams& params)
{
    const Vec3 e3 = Vec3::UnitZ();
    const Vec3 axis = geometry.R * e3;
    const Vec3 axis_s = geometry.R_s * e3;
    const auto offsets = params.chamber_offsets();

    Wrench out;
    for (int i = 0; i < MaterialParams::n_chambers; ++i) {
        const double force = pressures.p[i] * params.chamber_area;
        const Vec3 arm = geometry.p + geometry.R * offsets[i];
        const Vec3 arm_s = geometry.p_s + geometry.R_s * offsets[i];
        out.f += force * axis_s;
        out.l += force * (arm_s.cross(axis) + arm.cross(axis_s));
    }
    out.f -= gravity_load(params).f;
    return out;
}

EquivalentActuation wrench_to_equivalent(const Wrench& w, const Mat3& axes,
                                         const MaterialParams& params, EquivalentForm form)
{
    const double ly = w.l.dot(axes.col(1));
    const double lx = w.l.dot(axes.col(0));
    const double fz = w.f.dot(axes.col(2));
    const double a = params.chamber_area;
    if (form == EquivalentForm::Quadratic) {
        return {Vec3(ly * ly / a, lx * lx / a, fz * fz / a)};
    }
    return {Vec3(ly / a, lx / a, fz / a)};
}

Wrench equivalent_to_wrench(const EquivalentActuation& eq, const Mat3& axes,
                            const MaterialParams& params)
{
    const double a = params.chamber_area;
    Wrench w;
    w.f = a * eq.P.z() * axes.col(2);
    w.l = a * (eq.P.y() * axes.col(0) + eq.P.x() * axes.col(1));
    return w;
}

ChamberPressures allocate_pressures(const EquivalentActuation& eq)
{
    const double px = eq.P.x();
    const double py = eq.P.y();
    const double pz = eq.P.z();
    ChamberPressures out;
    out.p = {(-px + py + pz) / 4.0, (px + py + pz) / 4.0, (-px - py + pz) / 4.0,
             (px - py + pz) / 4.0};
    return out;
}

ChamberPressures clamp_pressures(const ChamberPressures& p, const PressureLimits& limits)
{
    ChamberPressures out = p;
    for (double& v : out.p) {
        const double c = std::clamp(v, limits.p_min, limits.p_max);
        if (c != v) {
            out.clamped = true;
        }
        v = c;
    }
    return out;
}

ChamberPressures equivalent_to_pressures(const EquivalentActuation& eq,
                                         const PressureLimits& limits)
{
    return clamp_pressures(allocate_pressures(eq), limits);
}

EquivalentActuation pressures_to_equivalent(const ChamberPressures& p)
{
    const auto& c = p.p;
    return {Vec3(-c[0] + c[1] - c[2] + c[3], c[0] + c[1] - c[2] - c[3], c[0] + c[1] + c[2] + c[3])};
}

LagPlantState lag_plant_step(const LagPlantState& state, const ChamberPressures& p_d, double dt)
{
    if (!(dt > 0.0)) {
        throw InvalidStep("time step must be positive");
    }
    LagPlantState out = state;
    out.p_m.clamped = p_d.clamped;
    if (state.time_constant <= 0.0) {
        out.p_m.p = p_d.p;
        return out;
    }
    const double gain = std::min(1.0, dt / state.time_constant);
    for (int i = 0; i < 4; ++i) {
        out.p_m.p[i] = state.p_m.p[i] + gain * (p_d.p[i] - state.p_m.p[i]);
    }
    return out;
}

} // namespace softarm
