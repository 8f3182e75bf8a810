#pragma once

#include <Eigen/Dense>

namespace softarm {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Diag3 = Eigen::DiagonalMatrix<double, 3>;

// Cross-product matrix: hat(a) * b == a.cross(b).
inline Mat3 hat(const Vec3& a)
{
    Mat3 m;
    m << 0.0, -a.z(), a.y(),
         a.z(), 0.0, -a.x(),
         -a.y(), a.x(), 0.0;
    return m;
}

// Gram-Schmidt on the columns, keeping the third column direction (the
// backbone tangent) as the anchor.
inline Mat3 orthonormalize(const Mat3& r)
{
    Vec3 z = r.col(2).normalized();
    Vec3 x = r.col(0) - z.dot(r.col(0)) * z;
    x.normalize();
    Mat3 out;
    out.col(0) = x;
    out.col(1) = z.cross(x);
    out.col(2) = z;
    return out;
}

inline double orthonormality_error(const Mat3& r)
{
    return (r.transpose() * r - Mat3::Identity()).norm();
}

inline Mat3 rot_x(double a)
{
    return Eigen::AngleAxisd(a, Vec3::UnitX()).toRotationMatrix();
}

inline Mat3 rot_y(double a)
{
    return Eigen::AngleAxisd(a, Vec3::UnitY()).toRotationMatrix();
}

inline Mat3 rot_z(double a)
{
    return Eigen::AngleAxisd(a, Vec3::UnitZ()).toRotationMatrix();
}

} // namespace softarm
