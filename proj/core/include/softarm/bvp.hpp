#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "softarm/errors.hpp"
#include "softarm/rod.hpp"

namespace softarm {

struct Pose {
    Vec3 p = Vec3::Zero();
    Mat3 R = Mat3::Identity();
};

// Internal force and moment at the fixed base, global frame.
struct BaseWrench {
    Vec3 n = Vec3::Zero();
    Vec3 m = Vec3::Zero();
};

// N segments chained tip to base. Node storage is per segment with n + 1
// local nodes, so the junction between two segments appears twice: once as
// the tip of segment j and once as the base of segment j + 1. Pose, wrench
// and velocities agree at a junction; strains are evaluated with each
// side's own material and reference.
class RodModel {
public:
    RodModel(std::vector<MaterialParams> segments, int nodes_per_segment);

    std::size_t segment_count() const { return segments_.size(); }
    int nodes_per_segment() const { return nodes_; }
    std::size_t local_nodes() const { return static_cast<std::size_t>(nodes_) + 1; }
    std::size_t node_count() const { return segments_.size() * local_nodes(); }
    std::size_t index(std::size_t seg, std::size_t k) const { return seg * local_nodes() + k; }

    const MaterialParams& params(std::size_t seg) const { return segments_[seg]; }
    const StiffnessSet& stiffness(std::size_t seg) const { return stiffness_[seg]; }
    double ds(std::size_t seg) const { return segments_[seg].L0 / nodes_; }
    double total_length() const;

private:
    std::vector<MaterialParams> segments_;
    std::vector<StiffnessSet> stiffness_;
    int nodes_;
};

// Distributed load as a function of (segment, local arc length).
using LoadField = std::function<Wrench(std::size_t seg, double s)>;

LoadField uniform_load(const Wrench& w);

// Linear interpolation of per-node loads (flattened RodModel indexing).
LoadField interpolated_loads(const RodModel& rod, std::vector<Wrench> per_node);

struct SweepProblem {
    const RodModel* rod = nullptr;
    Pose base;
    LoadField loads;                    // empty: unloaded
    TimeLevel time;                     // default: static
    std::vector<Configuration> rest;    // per node reference strain; empty: material v*, u*
};

struct ShootingConfig {
    double residual_tol = 1e-8;   // on |(n_L, m_L)| / max(1, E A)
    int max_iters = 50;
    double fd_epsilon = 1e-6;
    int max_halvings = 8;

    bool operator==(const ShootingConfig&) const = default;
};

struct RodSweepResult {
    std::vector<NodeState> states;
    BaseWrench base;
    Vec3 n_L = Vec3::Zero();
    Vec3 m_L = Vec3::Zero();
    int iterations = 0;
    double residual_norm = 0.0;
};

namespace detail {

inline NodeState advance(const NodeState& y, const SpatialDerivative& d, double h)
{
    NodeState out = y;
    out.p += h * d.p_s;
    out.R += h * d.R_s;
    out.n += h * d.n_s;
    out.m += h * d.m_s;
    out.q += h * d.q_s;
    out.w += h * d.w_s;
    return out;
}

inline void check_finite(const NodeState& y)
{
    if (!y.all_finite()) {
        throw DivergenceError("non-finite state during spatial integration");
    }
}

} // namespace detail

// One classical RK4 step in arc length. `rhs(s, y)` must fill y.v and y.u
// (the algebraic strains at that point) and return the spatial derivative.
// The returned state carries v and u evaluated at s + ds.
template <class Rhs>
NodeState rk4_spatial_step(const NodeState& state, Rhs&& rhs, double s, double ds)
{
    if (!(ds > 0.0)) {
        throw InvalidStep("spatial step must be positive");
    }
    NodeState y1 = state;
    const SpatialDerivative k1 = rhs(s, y1);
    NodeState y2 = detail::advance(y1, k1, 0.5 * ds);
    detail::check_finite(y2);
    const SpatialDerivative k2 = rhs(s + 0.5 * ds, y2);
    NodeState y3 = detail::advance(y1, k2, 0.5 * ds);
    detail::check_finite(y3);
    const SpatialDerivative k3 = rhs(s + 0.5 * ds, y3);
    NodeState y4 = detail::advance(y1, k3, ds);
    detail::check_finite(y4);
    const SpatialDerivative k4 = rhs(s + ds, y4);

    const double h = ds / 6.0;
    NodeState out = y1;
    out.p += h * (k1.p_s + 2.0 * k2.p_s + 2.0 * k3.p_s + k4.p_s);
    out.R += h * (k1.R_s + 2.0 * k2.R_s + 2.0 * k3.R_s + k4.R_s);
    out.n += h * (k1.n_s + 2.0 * k2.n_s + 2.0 * k3.n_s + k4.n_s);
    out.m += h * (k1.m_s + 2.0 * k2.m_s + 2.0 * k3.m_s + k4.m_s);
    out.q += h * (k1.q_s + 2.0 * k2.q_s + 2.0 * k3.q_s + k4.q_s);
    out.w += h * (k1.w_s + 2.0 * k2.w_s + 2.0 * k3.w_s + k4.w_s);
    detail::check_finite(out);
    out.R = orthonormalize(out.R);
    rhs(s + ds, out);
    detail::check_finite(out);
    return out;
}

RodSweepResult sweep_rod(const BaseWrench& guess, const SweepProblem& problem);

RodSweepResult shooting_solve(const BaseWrench& initial_guess, const SweepProblem& problem,
                              const ShootingConfig& cfg = {});

// Pose-only sweep with prescribed, segment-wise constant strains.
std::vector<NodeState> kinematic_sweep(const RodModel& rod, const Pose& base,
                                       const std::vector<Configuration>& per_segment);

} // namespace softarm
