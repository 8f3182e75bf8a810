#pragma once

#include <array>

#include "softarm/rod.hpp"

namespace softarm {

inline constexpr double kPsi = 6894.757293168361;   // Pa

// Per-segment equivalent actuation (Pa).
struct EquivalentActuation {
    Vec3 P = Vec3::Zero();
};

struct ChamberPressures {
    std::array<double, 4> p{};
    bool clamped = false;
};

struct PressureLimits {
    double p_min = kPsi;          // pre-load floor
    double p_max = 30.0 * kPsi;

    bool operator==(const PressureLimits&) const = default;
};

struct LagPlantState {
    ChamberPressures p_m;
    double time_constant = 0.0;   // s, 0 = ideal regulator
};

// Geometry of the backbone at one node, used by the pneumatic load model.
struct NodeGeometry {
    Vec3 p = Vec3::Zero();
    Mat3 R = Mat3::Identity();
    Vec3 p_s = Vec3::UnitZ();
    Mat3 R_s = Mat3::Zero();
};

// How a wrench component is turned into an equivalent pressure. `Signed`
// divides the component by the chamber area. `Quadratic` reproduces the
// squared-component form (sign lost, not a pressure); it exists only for
// inspection and is never used in the control chain.
enum class EquivalentForm { Signed, Quadratic };

double weight_per_length(const MaterialParams& params);   // rho * A

Wrench gravity_load(const MaterialParams& params);

Wrench pneumatic_wrench(const ChamberPressures& pressures, const NodeGeometry& geometry,
                        const MaterialParams& params);

// Components are read along the columns of `axes` (x, y, z unit vectors of
// the frame the actuation is expressed in).
EquivalentActuation wrench_to_equivalent(const Wrench& w, const Mat3& axes,
                                         const MaterialParams& params,
                                         EquivalentForm form = EquivalentForm::Signed);

// Inverse of the signed form: the force and moment a given P represents in
// the frame `axes`.
Wrench equivalent_to_wrench(const EquivalentActuation& eq, const Mat3& axes,
                            const MaterialParams& params);

// Four-chamber allocation without clamping.
ChamberPressures allocate_pressures(const EquivalentActuation& eq);

ChamberPressures clamp_pressures(const ChamberPressures& p, const PressureLimits& limits);

ChamberPressures equivalent_to_pressures(const EquivalentActuation& eq,
                                         const PressureLimits& limits);

EquivalentActuation pressures_to_equivalent(const ChamberPressures& p);

// Explicit first-order lag toward p_d. The gain dt / time_constant is capped
// at 1 so a step longer than the time constant lands on p_d instead of
// overshooting.
LagPlantState lag_plant_step(const LagPlantState& state, const ChamberPressures& p_d, double dt);

} // namespace softarm
