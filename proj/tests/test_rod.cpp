#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "softarm/actuation.hpp"
#include "softarm/errors.hpp"
#include "softarm/rod.hpp"

using namespace softarm;

namespace {

Mat3 random_rotation(std::mt19937_64& rng)
{
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
    return q.normalized().toRotationMatrix();
}

Vec3 random_vec(std::mt19937_64& rng, double scale = 1.0)
{
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng), u(rng), u(rng)};
}

} // namespace

TEST(Stiffness, DefaultSegmentMatchesHandArithmetic)
{
    const StiffnessSet s = stiffness_matrices(MaterialParams{});
    EXPECT_NEAR(s.K_se.diagonal()[0], 1176.6, 0.05);
    EXPECT_NEAR(s.K_se.diagonal()[1], 1176.6, 0.05);
    EXPECT_NEAR(s.K_se.diagonal()[2], 2470.9, 0.05);
    const double jxx = std::numbers::pi * std::pow(0.053, 4) / 4.0;
    EXPECT_DOUBLE_EQ(s.K_bt.diagonal()[0], 0.28e6 * jxx);
    EXPECT_DOUBLE_EQ(s.K_bt.diagonal()[2], 0.1e6 * 2.0 * jxx);
}

TEST(Stiffness, ZeroTauGivesZeroDamping)
{
    const StiffnessSet s = stiffness_matrices(MaterialParams{});
    EXPECT_EQ(s.B_se.diagonal(), Vec3::Zero());
    EXPECT_EQ(s.B_bt.diagonal(), Vec3::Zero());
}

TEST(Stiffness, DampingIsTauTimesStiffness)
{
    MaterialParams p;
    p.tau = 0.02;
    const StiffnessSet s = stiffness_matrices(p);
    EXPECT_EQ(s.B_se.diagonal(), 0.02 * s.K_se.diagonal());
    EXPECT_EQ(s.B_bt.diagonal(), 0.02 * s.K_bt.diagonal());
}

TEST(Stiffness, UnitModuliUnitAreaGiveIdentityShearStiffness)
{
    MaterialParams p;
    p.E = 1.0;
    p.G = 1.0;
    p.alpha_c = 1.0;
    p.r0 = 1.0 / std::sqrt(std::numbers::pi);
    const StiffnessSet s = stiffness_matrices(p);
    EXPECT_NEAR((s.K_se.diagonal() - Vec3::Ones()).norm(), 0.0, 1e-15);
}

TEST(MaterialParams, SecondMomentOfCircularSection)
{
    const MaterialParams p;
    const Vec3 j = p.second_moment();
    EXPECT_DOUBLE_EQ(j.x(), std::numbers::pi * std::pow(p.r0, 4) / 4.0);
    EXPECT_DOUBLE_EQ(j.y(), j.x());
    EXPECT_DOUBLE_EQ(j.z(), 2.0 * j.x());
}

TEST(MaterialParams, ChamberOffsetsAreSymmetric)
{
    const MaterialParams p;
    Vec3 sum = Vec3::Zero();
    for (const Vec3& r : p.chamber_offsets()) {
        EXPECT_NEAR(r.norm(), p.chamber_offset, 1e-15);
        EXPECT_EQ(r.z(), 0.0);
        sum += r;
    }
    EXPECT_LT(sum.norm(), 1e-18);
}

TEST(MaterialParams, ValidateRejectsNonPositiveModulus)
{
    MaterialParams p;
    p.E = 0.0;
    EXPECT_THROW(p.validate(), InvalidParams);
    p = MaterialParams{};
    p.rho = -1.0;
    EXPECT_THROW(p.validate(), InvalidParams);
    EXPECT_NO_THROW(MaterialParams{}.validate());
}

TEST(Bdf, Coefficients)
{
    EXPECT_DOUBLE_EQ(bdf2_coefficients(0.05).c0, 30.0);
    const BdfCoefficients c = bdf2_coefficients(1.0);
    EXPECT_DOUBLE_EQ(c.c0, 1.5);
    EXPECT_DOUBLE_EQ(c.w1, -2.0);
    EXPECT_DOUBLE_EQ(c.w2, 0.5);
    const BdfCoefficients e = bdf1_coefficients(0.1);
    EXPECT_DOUBLE_EQ(e.c0, 10.0);
    EXPECT_DOUBLE_EQ(e.w1, -10.0);
    EXPECT_DOUBLE_EQ(e.w2, 0.0);
}

TEST(Bdf, RejectsNonPositiveStep)
{
    EXPECT_THROW(bdf2_coefficients(0.0), InvalidStep);
    EXPECT_THROW(bdf2_coefficients(-0.1), InvalidStep);
    EXPECT_THROW(bdf1_coefficients(0.0), InvalidStep);
}

TEST(Bdf, ConstantSignalHasZeroDerivative)
{
    const BdfCoefficients c = bdf2_coefficients(0.05);
    const double k = 3.7;
    EXPECT_NEAR(c.c0 * k + c.w1 * k + c.w2 * k, 0.0, 1e-12);
}

TEST(Bdf, ExactOnQuadratics)
{
    const double dt = 0.05;
    const BdfCoefficients c = bdf2_coefficients(dt);
    for (int i = 2; i < 50; ++i) {
        const double t = i * dt;
        const double d = c.c0 * t * t + c.w1 * (t - dt) * (t - dt) + c.w2 * (t - 2 * dt) * (t - 2 * dt);
        EXPECT_NEAR(d, 2.0 * t, 1e-11);
    }
}

TEST(HistoryBuffer, SchemeFollowsCompletedSteps)
{
    HistoryBuffer h(3);
    EXPECT_EQ(h.coefficients(0.1).c0, 0.0);
    EXPECT_EQ(h.terms(0, 0.1).v_h, Vec3::Zero());

    std::vector<RateSample> s1(3);
    s1[1].v = Vec3(0.1, 0.2, 1.3);
    h.push(s1);
    EXPECT_DOUBLE_EQ(h.coefficients(0.1).c0, 10.0);
    EXPECT_NEAR((h.terms(1, 0.1).v_h - (-s1[1].v / 0.1)).norm(), 0.0, 1e-13);

    std::vector<RateSample> s2(3);
    s2[1].v = Vec3(0.4, -0.2, 1.1);
    s2[1].u = Vec3(1.0, 2.0, 3.0);
    s2[1].q = Vec3(-1.0, 0.5, 0.25);
    s2[1].w = Vec3(0.3, 0.2, 0.1);
    h.push(s2);
    const double dt = 0.05;
    const HistoryTerms t = h.terms(1, dt);
    EXPECT_NEAR((t.v_h - (-2.0 * s2[1].v + 0.5 * s1[1].v) / dt).norm(), 0.0, 1e-12);
    EXPECT_NEAR((t.u_h - (-2.0 * s2[1].u + 0.5 * s1[1].u) / dt).norm(), 0.0, 1e-12);
    EXPECT_NEAR((t.q_h - (-2.0 * s2[1].q + 0.5 * s1[1].q) / dt).norm(), 0.0, 1e-12);
    EXPECT_NEAR((t.w_h - (-2.0 * s2[1].w + 0.5 * s1[1].w) / dt).norm(), 0.0, 1e-12);
}

TEST(HistoryBuffer, RejectsWrongSampleCount)
{
    HistoryBuffer h(3);
    EXPECT_THROW(h.push(std::vector<RateSample>(2)), InvalidParams);
}

TEST(ClosedFormConfig, UnloadedRodSitsAtReference)
{
    const MaterialParams p;
    const StiffnessSet s = stiffness_matrices(p);
    HistoryTerms h;
    h.v_h = Vec3(4.0, 5.0, 6.0);
    const Configuration c = closed_form_config(Vec3::Zero(), Vec3::Zero(), Mat3::Identity(), h, s,
                                               30.0, p);
    EXPECT_EQ(c.v, Vec3(0.0, 0.0, 1.0));
    EXPECT_EQ(c.u, Vec3::Zero());
}

TEST(ClosedFormConfig, AxialLoadStretches)
{
    const MaterialParams p;
    const StiffnessSet s = stiffness_matrices(p);
    const Vec3 n(0.0, 0.0, p.E * p.area() * 0.1);
    const Configuration c = closed_form_config(n, Vec3::Zero(), Mat3::Identity(), {}, s, 0.0, p);
    EXPECT_NEAR((c.v - Vec3(0.0, 0.0, 1.1)).norm(), 0.0, 1e-14);
}

TEST(ClosedFormConfig, BendingMomentCurves)
{
    const MaterialParams p;
    const StiffnessSet s = stiffness_matrices(p);
    const double kappa = 2.5;
    const Vec3 m(p.E * p.second_moment().x() * kappa, 0.0, 0.0);
    const Configuration c = closed_form_config(Vec3::Zero(), m, Mat3::Identity(), {}, s, 0.0, p);
    EXPECT_NEAR((c.u - Vec3(kappa, 0.0, 0.0)).norm(), 0.0, 1e-14);
}

TEST(ClosedFormConfig, InvertsLinearLawRoundTrip)
{
    std::mt19937_64 rng(7);
    const MaterialParams p;
    const StiffnessSet s = stiffness_matrices(p);
    for (int i = 0; i < 200; ++i) {
        const Vec3 v = p.v_star + random_vec(rng, 0.2);
        const Vec3 u = random_vec(rng, 5.0);
        const Vec3 n = s.K_se * (v - p.v_star);
        const Vec3 m = s.K_bt * (u - p.u_star);
        const Configuration c = closed_form_config(n, m, Mat3::Identity(), {}, s, 0.0, p);
        EXPECT_LT((c.v - v).norm(), 1e-10 * v.norm());
        EXPECT_LT((c.u - u).norm(), 1e-10 * std::max(1.0, u.norm()));
    }
}

TEST(ClosedFormConfig, ViscousTermsUseHistory)
{
    std::mt19937_64 rng(11);
    MaterialParams p;
    p.tau = 0.03;
    const StiffnessSet s = stiffness_matrices(p);
    const Mat3 R = random_rotation(rng);
    const Vec3 n = random_vec(rng, 50.0);
    const Vec3 m = random_vec(rng, 0.5);
    HistoryTerms h;
    h.v_h = random_vec(rng, 10.0);
    h.u_h = random_vec(rng, 10.0);
    const double c0 = 30.0;
    const Configuration c = closed_form_config(n, m, R, h, s, c0, p);
    // The law being inverted: R^T n = K (v - v*) + B v_t with v_t = c0 v + v_h.
    const Vec3 v_t = c0 * c.v + h.v_h;
    const Vec3 u_t = c0 * c.u + h.u_h;
    EXPECT_LT((s.K_se * (c.v - p.v_star) + s.B_se * v_t - R.transpose() * n).norm(), 1e-10);
    EXPECT_LT((s.K_bt * (c.u - p.u_star) + s.B_bt * u_t - R.transpose() * m).norm(), 1e-12);
}

TEST(ClosedFormConfig, SingularStiffnessThrows)
{
    StiffnessSet s = stiffness_matrices(MaterialParams{});
    s.K_se.diagonal()[1] = 0.0;
    EXPECT_THROW(closed_form_config(Vec3::Zero(), Vec3::Zero(), Mat3::Identity(), {}, s, 0.0,
                                    MaterialParams{}),
                 ConstitutiveSingularity);
}

TEST(SpatialRhs, StaticUnloadedRodIsInEquilibrium)
{
    std::mt19937_64 rng(3);
    const MaterialParams p;
    NodeState y;
    y.R = random_rotation(rng);
    y.v = Vec3(0.01, -0.02, 1.05);
    y.u = Vec3(1.0, -2.0, 0.5);
    const ConfigRates zero{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
    const SpatialDerivative d = spatial_rhs(y, zero, {}, p);
    EXPECT_LT(d.n_s.norm(), 1e-15);
    EXPECT_LT(d.m_s.norm(), 1e-15);
    EXPECT_LT((d.p_s - y.R * y.v).norm(), 1e-15);
    EXPECT_LT((d.R_s - y.R * hat(y.u)).norm(), 1e-15);
}

TEST(SpatialRhs, GravityOnlyStaticBalance)
{
    const MaterialParams p;
    NodeState y;
    const ConfigRates zero{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
    const SpatialDerivative d = spatial_rhs(y, zero, gravity_load(p), p);
    const double w = 792.8 * std::numbers::pi * 0.053 * 0.053 * 9.81;
    EXPECT_NEAR(d.n_s.z(), w, 1e-12);
    EXPECT_NEAR(d.n_s.head<2>().norm(), 0.0, 1e-15);
}

TEST(SpatialRhs, StraightReferenceConfiguration)
{
    const ConfigRates zero{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
    const SpatialDerivative d = spatial_rhs(NodeState{}, zero, {}, MaterialParams{});
    EXPECT_EQ(d.p_s, Vec3(0.0, 0.0, 1.0));
    EXPECT_EQ(d.R_s, Mat3::Zero());
}

TEST(SpatialRhs, KinematicTermsMatchDefinition)
{
    std::mt19937_64 rng(5);
    const MaterialParams p;
    NodeState y;
    y.R = random_rotation(rng);
    y.v = random_vec(rng);
    y.u = random_vec(rng);
    y.q = random_vec(rng);
    y.w = random_vec(rng);
    y.n = random_vec(rng, 10.0);
    const ConfigRates r{random_vec(rng), random_vec(rng), random_vec(rng), random_vec(rng)};
    const SpatialDerivative d = spatial_rhs(y, r, {}, p);
    EXPECT_LT((d.q_s - (r.v_t - y.u.cross(y.q) + y.w.cross(y.v))).norm(), 1e-14);
    EXPECT_LT((d.w_s - (r.u_t - y.u.cross(y.w))).norm(), 1e-14);
    const double rho_a = p.rho * p.area();
    EXPECT_LT((d.n_s - y.R * (rho_a * (y.w.cross(y.q) + r.q_t))).norm(), 1e-12);
    const Vec3 jw = p.second_moment().cwiseProduct(y.w);
    const Vec3 jwt = p.second_moment().cwiseProduct(r.w_t);
    const Vec3 m_s = y.R * (p.rho * (y.w.cross(jw) + jwt)) - (y.R * y.v).cross(y.n);
    EXPECT_LT((d.m_s - m_s).norm(), 1e-12);
}

TEST(Hat, SkewAndCrossProduct)
{
    std::mt19937_64 rng(9);
    for (int i = 0; i < 100; ++i) {
        const Vec3 a = random_vec(rng, 10.0);
        const Vec3 b = random_vec(rng, 10.0);
        const Mat3 h = hat(a);
        EXPECT_EQ(h + h.transpose(), Mat3::Zero());
        EXPECT_LT((h * b - a.cross(b)).norm(), 1e-13);
    }
}

TEST(Orthonormalize, RestoresRotation)
{
    std::mt19937_64 rng(13);
    for (int i = 0; i < 100; ++i) {
        const Mat3 R = random_rotation(rng);
        Mat3 noisy = R;
        noisy += 1e-6 * Mat3::Random();
        const Mat3 fixed = orthonormalize(noisy);
        EXPECT_LT(orthonormality_error(fixed), 1e-12);
        EXPECT_NEAR(fixed.determinant(), 1.0, 1e-12);
        EXPECT_LT((fixed - R).norm(), 1e-5);
    }
}
