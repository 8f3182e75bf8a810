#include "softarm/bvp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace softarm {

RodModel::RodModel(std::vector<MaterialParams> segments, int nodes_per_segment)
    : segments_(std::move(segments)), nodes_(nodes_per_segment)
{
    if (segments_.empty()) {
        throw InvalidParams("rod needs at least one segment");
    }
    if (nodes_ < 1) {
        throw InvalidParams("nodes per segment must be at least 1");
    }
    for (const auto& p : segments_) {
        p.validate();
        stiffness_.push_back(stiffness_matrices(p));
    }
}

double RodModel::total_length() const
{
    double l = 0.0;
    for (const auto& p : segments_) {
        l += p.L0;
    }
    return l;
}

LoadField uniform_load(const Wrench& w)
{
    return [w](std::size_t, double) { return w; };
}

LoadField interpolated_loads(const RodModel& rod, std::vector<Wrench> per_node)
{
    if (per_node.size() != rod.node_count()) {
        throw InvalidParams("load table size does not match node count");
    }
    const int n = rod.nodes_per_segment();
    std::vector<double> ds(rod.segment_count());
    for (std::size_t j = 0; j < ds.size(); ++j) {
        ds[j] = rod.ds(j);
    }
    const std::size_t local = rod.local_nodes();
    return [table = std::move(per_node), ds = std::move(ds), n, local](std::size_t seg, double s) {
        const double x = s / ds[seg];
        const int k = std::clamp(static_cast<int>(std::floor(x)), 0, n - 1);
        const double t = x - k;
        const Wrench& a = table[seg * local + k];
        const Wrench& b = table[seg * local + k + 1];
        return a * (1.0 - t) + b * t;
    };
}

namespace {

struct SegmentRhs {
    const RodModel& rod;
    const SweepProblem& problem;
    std::size_t seg;
    std::size_t k;

    SpatialDerivative operator()(double s, NodeState& y) const
    {
        const MaterialParams& params = rod.params(seg);
        const double ds = rod.ds(seg);
        const double t = std::clamp(s / ds - static_cast<double>(k), 0.0, 1.0);
        const std::size_t a = rod.index(seg, k);
        const std::size_t b = a + 1;

        const HistoryTerms hist = problem.time.history.empty()
            ? HistoryTerms{}
            : problem.time.history[a].lerp(problem.time.history[b], t);
        Vec3 v_star = params.v_star;
        Vec3 u_star = params.u_star;
        if (!problem.rest.empty()) {
            v_star = (1.0 - t) * problem.rest[a].v + t * problem.rest[b].v;
            u_star = (1.0 - t) * problem.rest[a].u + t * problem.rest[b].u;
        }
        const double c0 = problem.time.c0;
        const Configuration c = closed_form_config(y.n, y.m, y.R, hist, rod.stiffness(seg), c0,
                                                   v_star, u_star);
        y.v = c.v;
        y.u = c.u;
        const Wrench ext = problem.loads ? problem.loads(seg, s) : Wrench{};
        return spatial_rhs(y, config_rates(y, hist, c0), ext, params);
    }
};

} // namespace

RodSweepResult sweep_rod(const BaseWrench& guess, const SweepProblem& problem)
{
    if (problem.rod == nullptr) {
        throw InvalidParams("sweep problem has no rod model");
    }
    if (!guess.n.allFinite() || !guess.m.allFinite()) {
        throw DivergenceError("non-finite shooting guess");
    }
    const RodModel& rod = *problem.rod;
    if (!problem.time.history.empty() && problem.time.history.size() != rod.node_count()) {
        throw InvalidParams("history size does not match node count");
    }
    if (!problem.rest.empty() && problem.rest.size() != rod.node_count()) {
        throw InvalidParams("reference strain size does not match node count");
    }

    RodSweepResult out;
    out.base = guess;
    out.states.resize(rod.node_count());

    NodeState y;
    y.p = problem.base.p;
    y.R = problem.base.R;
    y.n = guess.n;
    y.m = guess.m;

    for (std::size_t seg = 0; seg < rod.segment_count(); ++seg) {
        const double ds = rod.ds(seg);
        for (int k = 0; k < rod.nodes_per_segment(); ++k) {
            const SegmentRhs rhs{rod, problem, seg, static_cast<std::size_t>(k)};
            const double s = k * ds;
            if (k == 0) {
                NodeState base = y;
                rhs(s, base);
                out.states[rod.index(seg, 0)] = base;
            }
            y = rk4_spatial_step(y, rhs, s, ds);
            out.states[rod.index(seg, k + 1)] = y;
        }
    }
    out.n_L = y.n;
    out.m_L = y.m;
    Vec6 r;
    r << out.n_L, out.m_L;
    const MaterialParams& p0 = rod.params(0);
    out.residual_norm = r.norm() / std::max(1.0, p0.E * p0.area());
    return out;
}

namespace {

Vec6 pack(const BaseWrench& w)
{
    Vec6 x;
    x << w.n, w.m;
    return x;
}

BaseWrench unpack(const Vec6& x)
{
    return {x.head<3>(), x.tail<3>()};
}

Vec6 residual_of(const RodSweepResult& r)
{
    Vec6 x;
    x << r.n_L, r.m_L;
    return x;
}

} // namespace

RodSweepResult shooting_solve(const BaseWrench& initial_guess, const SweepProblem& problem,
                              const ShootingConfig& cfg)
{
    if (!(cfg.residual_tol > 0.0) || cfg.max_iters < 1) {
        throw InvalidParams("invalid shooting configuration");
    }
    RodSweepResult current = sweep_rod(initial_guess, problem);
    int iters = 0;
    while (current.residual_norm > cfg.residual_tol) {
        if (iters >= cfg.max_iters) {
            throw NonConvergence("shooting did not converge", current.residual_norm);
        }
        const Vec6 x = pack(current.base);
        const Vec6 r = residual_of(current);
        const double eps = cfg.fd_epsilon * std::max(1.0, x.norm());
        Mat6 jac;
        for (int i = 0; i < 6; ++i) {
            Vec6 xp = x;
            xp[i] += eps;
            jac.col(i) = (residual_of(sweep_rod(unpack(xp), problem)) - r) / eps;
        }
        const Vec6 dx = jac.colPivHouseholderQr().solve(-r);
        if (!dx.allFinite()) {
            throw NonConvergence("singular shooting Jacobian", current.residual_norm);
        }

        double lambda = 1.0;
        bool have_trial = false;
        RodSweepResult trial;
        for (int h = 0; h <= cfg.max_halvings; ++h, lambda *= 0.5) {
            try {
                trial = sweep_rod(unpack(x + lambda * dx), problem);
                have_trial = true;
            } catch (const DivergenceError&) {
                continue;
            }
            if (trial.residual_norm < current.residual_norm) {
                break;
            }
        }
        if (!have_trial) {
            throw NonConvergence("shooting step diverged", current.residual_norm);
        }
        current = std::move(trial);
        ++iters;
    }
    current.iterations = iters;
    return current;
}

std::vector<NodeState> kinematic_sweep(const RodModel& rod, const Pose& base,
                                       const std::vector<Configuration>& per_segment)
{
    if (per_segment.size() != rod.segment_count()) {
        throw InvalidParams("one configuration per segment is required");
    }
    std::vector<NodeState> states(rod.node_count());
    NodeState y;
    y.p = base.p;
    y.R = base.R;
    for (std::size_t seg = 0; seg < rod.segment_count(); ++seg) {
        const Configuration c = per_segment[seg];
        auto rhs = [&c](double, NodeState& s) {
            s.v = c.v;
            s.u = c.u;
            SpatialDerivative d;
            d.p_s = s.R * c.v;
            d.R_s = s.R * hat(c.u);
            d.n_s.setZero();
            d.m_s.setZero();
            d.q_s.setZero();
            d.w_s.setZero();
            return d;
        };
        y.v = c.v;
        y.u = c.u;
        states[rod.index(seg, 0)] = y;
        const double ds = rod.ds(seg);
        for (int k = 0; k < rod.nodes_per_segment(); ++k) {
            y = rk4_spatial_step(y, rhs, k * ds, ds);
            states[rod.index(seg, k + 1)] = y;
        }
    }
    return states;
}

} // namespace softarm
