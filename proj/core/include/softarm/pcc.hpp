#pragma once

#include "softarm/math.hpp"

namespace softarm {

struct PccConfig {
    double kappa = 0.0;   // 1/m
    double phi = 0.0;     // rad, bending plane about z from x
    double L = 0.0;       // m
};

// Tip position and orientation in the segment's base frame.
struct TipPose {
    Vec3 position = Vec3::Zero();
    Mat3 R = Mat3::Identity();
};

// Arc-length recovery. `Geometric` is exact for constant-curvature arcs,
// since x / z = tan(theta / 2). `PaperVerbatim` drops the factor two and
// returns half the arc length; it is kept for comparison only.
enum class ArcLengthMode { PaperVerbatim, Geometric };

inline constexpr double kBranchTolerance = 1e-9;   // m

struct PlanarStrain {
    double u_x = 0.0;
    double u_y = 0.0;
    double v_z = 1.0;
};

// Planar branches only: |y| < eps gives phi = 0, |x| < eps gives phi = pi/2,
// both gives the straight branch. Anything else throws OutOfBranch.
PccConfig tip_to_pcc(const TipPose& tip, ArcLengthMode mode = ArcLengthMode::Geometric);

PlanarStrain pcc_to_config(const PccConfig& pcc, double L0);

TipPose pcc_forward(const PccConfig& pcc);

} // namespace softarm
