#include "softarm/rod.hpp"

#include <cmath>
#include <numbers>

#include "softarm/errors.hpp"

namespace softarm {

double MaterialParams::area() const
{
    return std::numbers::pi * r0 * r0;
}

Vec3 MaterialParams::second_moment() const
{
    const double jxx = std::numbers::pi * std::pow(r0, 4) / 4.0;
    return {jxx, jxx, 2.0 * jxx};
}

std::array<Vec3, 4> MaterialParams::chamber_offsets() const
{
    const double c = chamber_offset / std::numbers::sqrt2;
    return {Vec3(c, c, 0.0), Vec3(-c, c, 0.0), Vec3(c, -c, 0.0), Vec3(-c, -c, 0.0)};
}

void MaterialParams::validate() const
{
    auto require = [](bool ok, const char* what) {
        if (!ok) {
            throw InvalidParams(what);
        }
    };
    require(std::isfinite(rho) && rho > 0.0, "density must be positive");
    require(std::isfinite(r0) && r0 > 0.0, "radius must be positive");
    require(std::isfinite(L0) && L0 > 0.0, "segment length must be positive");
    require(std::isfinite(E) && E > 0.0, "Young's modulus must be positive");
    require(std::isfinite(G) && G > 0.0, "shear modulus must be positive");
    require(std::isfinite(alpha_c) && alpha_c > 0.0, "shear correction must be positive");
    require(std::isfinite(tau) && tau >= 0.0, "damping time constant must be nonnegative");
    require(std::isfinite(chamber_area) && chamber_area > 0.0, "chamber area must be positive");
    require(std::isfinite(chamber_offset) && chamber_offset >= 0.0,
            "chamber offset must be nonnegative");
    require(g.allFinite() && v_star.allFinite() && u_star.allFinite(),
            "vector parameters must be finite");
}

bool NodeState::all_finite() const
{
    return p.allFinite() && R.allFinite() && n.allFinite() && m.allFinite() && v.allFinite()
        && u.allFinite() && q.allFinite() && w.allFinite();
}

BdfCoefficients bdf2_coefficients(double dt)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw InvalidStep("time step must be positive");
    }
    return {1.5 / dt, -2.0 / dt, 0.5 / dt};
}

BdfCoefficients bdf1_coefficients(double dt)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw InvalidStep("time step must be positive");
    }
    return {1.0 / dt, -1.0 / dt, 0.0};
}

HistoryTerms HistoryTerms::lerp(const HistoryTerms& o, double t) const
{
    const double s = 1.0 - t;
    return {s * v_h + t * o.v_h, s * u_h + t * o.u_h, s * q_h + t * o.q_h, s * w_h + t * o.w_h};
}

HistoryBuffer::HistoryBuffer(std::size_t nodes) : prev_(nodes), prev2_(nodes) {}

void HistoryBuffer::push(const std::vector<RateSample>& samples)
{
    if (samples.size() != prev_.size()) {
        throw InvalidParams("history sample count does not match node count");
    }
    prev2_ = prev_;
    prev_ = samples;
    ++steps_;
}

BdfCoefficients HistoryBuffer::coefficients(double dt) const
{
    if (steps_ == 0) {
        return {};
    }
    return steps_ == 1 ? bdf1_coefficients(dt) : bdf2_coefficients(dt);
}

HistoryTerms HistoryBuffer::terms(std::size_t node, double dt) const
{
    const BdfCoefficients c = coefficients(dt);
    const RateSample& a = prev_[node];
    const RateSample& b = prev2_[node];
    return {c.w1 * a.v + c.w2 * b.v, c.w1 * a.u + c.w2 * b.u, c.w1 * a.q + c.w2 * b.q,
            c.w1 * a.w + c.w2 * b.w};
}

std::vector<HistoryTerms> HistoryBuffer::all_terms(double dt) const
{
    std::vector<HistoryTerms> out(prev_.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = terms(k, dt);
    }
    return out;
}

HistoryTerms TimeLevel::at(std::size_t node) const
{
    return history.empty() ? HistoryTerms{} : history[node];
}

StiffnessSet stiffness_matrices(const MaterialParams& params)
{
    const double a = params.area();
    const Vec3 j = params.second_moment();
    StiffnessSet s;
    s.K_se = Diag3(params.alpha_c * params.G * a, params.alpha_c * params.G * a, params.E * a);
    s.K_bt = Diag3(params.E * j.x(), params.E * j.y(), params.G * j.z());
    s.B_se = Diag3(params.tau * s.K_se.diagonal());
    s.B_bt = Diag3(params.tau * s.K_bt.diagonal());
    return s;
}

namespace {

Vec3 solve_diagonal(const Vec3& k, const Vec3& rhs)
{
    for (int i = 0; i < 3; ++i) {
        if (!(std::abs(k[i]) > 0.0) || !std::isfinite(k[i])) {
            throw ConstitutiveSingularity("singular constitutive matrix");
        }
    }
    return rhs.cwiseQuotient(k);
}

} // namespace

Configuration closed_form_config(const Vec3& n, const Vec3& m, const Mat3& R,
                                 const HistoryTerms& hist, const StiffnessSet& stiff,
                                 double c0, const Vec3& v_star, const Vec3& u_star)
{
    const Vec3 kse = stiff.K_se.diagonal();
    const Vec3 kbt = stiff.K_bt.diagonal();
    const Vec3 bse = stiff.B_se.diagonal();
    const Vec3 bbt = stiff.B_bt.diagonal();
    const Vec3 v = solve_diagonal(kse + c0 * bse, R.transpose() * n + kse.cwiseProduct(v_star)
                                                      - bse.cwiseProduct(hist.v_h));
    const Vec3 u = solve_diagonal(kbt + c0 * bbt, R.transpose() * m + kbt.cwiseProduct(u_star)
                                                      - bbt.cwiseProduct(hist.u_h));
    return {v, u};
}

Configuration closed_form_config(const Vec3& n, const Vec3& m, const Mat3& R,
                                 const HistoryTerms& hist, const StiffnessSet& stiff,
                                 double c0, const MaterialParams& params)
{
    return closed_form_config(n, m, R, hist, stiff, c0, params.v_star, params.u_star);
}

ConfigRates config_rates(const NodeState& state, const HistoryTerms& hist, double c0)
{
    return {c0 * state.v + hist.v_h, c0 * state.u + hist.u_h, c0 * state.q + hist.q_h,
            c0 * state.w + hist.w_h};
}

SpatialDerivative spatial_rhs(const NodeState& state, const ConfigRates& rates,
                              const Wrench& ext, const MaterialParams& params)
{
    const double rho_a = params.rho * params.area();
    const Vec3 j = params.second_moment();
    const Mat3 w_hat = hat(state.w);
    const Mat3 u_hat = hat(state.u);

    SpatialDerivative d;
    d.p_s = state.R * state.v;
    d.R_s = state.R * u_hat;
    d.n_s = state.R * (rho_a * (w_hat * state.q + rates.q_t)) - ext.f;
    d.m_s = state.R * (params.rho * (w_hat * j.cwiseProduct(state.w) + j.cwiseProduct(rates.w_t)))
        - hat(d.p_s) * state.n - ext.l;
    d.q_s = rates.v_t - u_hat * state.q + w_hat * state.v;
    d.w_s = rates.u_t - u_hat * state.w;
    return d;
}

} // namespace softarm
