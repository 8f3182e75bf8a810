#include "softarm/pcc.hpp"

#include <cmath>
#include <numbers>

#include "softarm/errors.hpp"

namespace softarm {

namespace {

double arc_length(double lateral, double z, double kappa, ArcLengthMode mode)
{
    const double half_angle = std::atan2(lateral, z);
    return (mode == ArcLengthMode::Geometric ? 2.0 : 1.0) * half_angle / kappa;
}

} // namespace

PccConfig tip_to_pcc(const TipPose& tip, ArcLengthMode mode)
{
    const double x = tip.position.x();
    const double y = tip.position.y();
    const double z = tip.position.z();
    const bool x_small = std::abs(x) < kBranchTolerance;
    const bool y_small = std::abs(y) < kBranchTolerance;

    if (x_small && y_small) {
        return {0.0, 0.0, z};
    }
    if (y_small) {
        const double kappa = 2.0 * x / (x * x + z * z);
        return {kappa, 0.0, arc_length(x, z, kappa, mode)};
    }
    if (x_small) {
        const double kappa = 2.0 * y / (y * y + z * z);
        return {kappa, std::numbers::pi / 2.0, arc_length(y, z, kappa, mode)};
    }
    throw OutOfBranch("tip is outside the planar bending branches");
}

PlanarStrain pcc_to_config(const PccConfig& pcc, double L0)
{
    PlanarStrain out;
    if (pcc.kappa != 0.0) {
        if (pcc.phi == 0.0) {
            out.u_y = pcc.kappa;
        } else {
            out.u_x = -pcc.kappa;
        }
    }
    out.v_z = 1.0 + (pcc.L - L0) / L0;
    return out;
}

TipPose pcc_forward(const PccConfig& pcc)
{
    const double theta = pcc.kappa * pcc.L;
    double radial;
    double height;
    if (std::abs(theta) < 1e-6) {
        const double t2 = theta * theta;
        radial = 0.5 * pcc.kappa * pcc.L * pcc.L * (1.0 - t2 / 12.0);
        height = pcc.L * (1.0 - t2 / 6.0);
    } else {
        const double s = std::sin(0.5 * theta);
        radial = 2.0 * s * s / pcc.kappa;
        height = std::sin(theta) / pcc.kappa;
    }
    TipPose out;
    out.position = Vec3(radial * std::cos(pcc.phi), radial * std::sin(pcc.phi), height);
    out.R = rot_z(pcc.phi) * rot_y(theta) * rot_z(-pcc.phi);
    return out;
}

} // namespace softarm
