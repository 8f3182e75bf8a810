#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "softarm/math.hpp"

namespace softarm {

// Material and geometry of one segment. Defaults are the silicone segment of
// the reference arm: 18.5 cm long, 5.3 cm radius, four chambers 0.3 cm off
// the backbone. The measured segment mass (0.825 kg) is not used by the
// dynamics; density and area carry the inertia.
struct MaterialParams {
    double rho = 792.8;       // kg/m^3
    double r0 = 0.053;        // m
    double L0 = 0.185;        // m
    double E = 0.28e6;        // Pa
    double G = 0.1e6;         // Pa
    double alpha_c = 4.0 / 3.0;
    double tau = 0.0;         // s, material damping time constant
    double chamber_area = 3.1e-4;     // m^2, A_i
    double chamber_offset = 0.003;    // m, |r_i|
    Vec3 g = Vec3(0.0, 0.0, -9.81);
    Vec3 v_star = Vec3(0.0, 0.0, 1.0);
    Vec3 u_star = Vec3::Zero();

    static constexpr int n_chambers = 4;

    double area() const;              // A = pi r0^2
    Vec3 second_moment() const;       // diag(J) for a solid circular section

    // Chamber offsets in the local frame. Chamber i sits in the quadrant
    // (sx, sy) with sx = (+,-,+,-), sy = (+,+,-,-), so that a pressure
    // pattern with positive P_y bends about +x and positive P_x about +y.
    std::array<Vec3, 4> chamber_offsets() const;

    // Throws InvalidParams on nonpositive moduli, density or geometry.
    void validate() const;

    bool operator==(const MaterialParams&) const = default;
};

struct StiffnessSet {
    Diag3 K_se;
    Diag3 K_bt;
    Diag3 B_se;
    Diag3 B_bt;
};

// Distributed load per unit length, global frame.
struct Wrench {
    Vec3 f = Vec3::Zero();
    Vec3 l = Vec3::Zero();

    Wrench operator+(const Wrench& o) const { return {f + o.f, l + o.l}; }
    Wrench operator*(double s) const { return {f * s, l * s}; }
};

struct NodeState {
    Vec3 p = Vec3::Zero();
    Mat3 R = Mat3::Identity();
    Vec3 n = Vec3::Zero();
    Vec3 m = Vec3::Zero();
    Vec3 v = Vec3(0.0, 0.0, 1.0);
    Vec3 u = Vec3::Zero();
    Vec3 q = Vec3::Zero();
    Vec3 w = Vec3::Zero();

    bool all_finite() const;
};

struct Configuration {
    Vec3 v;
    Vec3 u;
};

// x_t ~= c0 * x + w1 * x^{i-1} + w2 * x^{i-2}
struct BdfCoefficients {
    double c0 = 0.0;
    double w1 = 0.0;
    double w2 = 0.0;
};

BdfCoefficients bdf2_coefficients(double dt);
BdfCoefficients bdf1_coefficients(double dt);

// History part of the BDF time derivative at one node.
struct HistoryTerms {
    Vec3 v_h = Vec3::Zero();
    Vec3 u_h = Vec3::Zero();
    Vec3 q_h = Vec3::Zero();
    Vec3 w_h = Vec3::Zero();

    HistoryTerms lerp(const HistoryTerms& o, double t) const;
};

struct RateSample {
    Vec3 v = Vec3(0.0, 0.0, 1.0);
    Vec3 u = Vec3::Zero();
    Vec3 q = Vec3::Zero();
    Vec3 w = Vec3::Zero();
};

// Per-node samples of (v, u, q, w) at the two most recent completed time
// steps. With no completed steps the scheme is static (c0 = 0, zero
// history); after one step it is implicit Euler; afterwards BDF2.
class HistoryBuffer {
public:
    explicit HistoryBuffer(std::size_t nodes = 0);

    std::size_t nodes() const { return prev_.size(); }
    int steps() const { return steps_; }

    void push(const std::vector<RateSample>& samples);

    BdfCoefficients coefficients(double dt) const;
    HistoryTerms terms(std::size_t node, double dt) const;
    std::vector<HistoryTerms> all_terms(double dt) const;

    const RateSample& previous(std::size_t node) const { return prev_[node]; }

private:
    std::vector<RateSample> prev_;
    std::vector<RateSample> prev2_;
    int steps_ = 0;
};

// Time-discretization data for one solve: c0 and the per-node history.
struct TimeLevel {
    double c0 = 0.0;
    std::vector<HistoryTerms> history;   // empty means all zero

    static TimeLevel statics() { return {}; }
    HistoryTerms at(std::size_t node) const;
};

struct ConfigRates {
    Vec3 v_t;
    Vec3 u_t;
    Vec3 q_t;
    Vec3 w_t;
};

struct SpatialDerivative {
    Vec3 p_s;
    Mat3 R_s;
    Vec3 n_s;
    Vec3 m_s;
    Vec3 q_s;
    Vec3 w_s;
};

StiffnessSet stiffness_matrices(const MaterialParams& params);

// Inverts the linear viscoelastic law for the local strains, with the
// reference strains given explicitly.
Configuration closed_form_config(const Vec3& n, const Vec3& m, const Mat3& R,
                                 const HistoryTerms& hist, const StiffnessSet& stiff,
                                 double c0, const Vec3& v_star, const Vec3& u_star);

Configuration closed_form_config(const Vec3& n, const Vec3& m, const Mat3& R,
                                 const HistoryTerms& hist, const StiffnessSet& stiff,
                                 double c0, const MaterialParams& params);

ConfigRates config_rates(const NodeState& state, const HistoryTerms& hist, double c0);

SpatialDerivative spatial_rhs(const NodeState& state, const ConfigRates& rates,
                              const Wrench& ext, const MaterialParams& params);

} // namespace softarm
