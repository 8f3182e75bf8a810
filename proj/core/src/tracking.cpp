#include "softarm/tracking.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "softarm/errors.hpp"

namespace softarm {

namespace {

// (v, u) packing of the six strain channels.
constexpr int kVz = 2;
constexpr int kUx = 3;
constexpr int kUy = 4;
constexpr std::array<int, 3> kActuated = {kVz, kUx, kUy};

Vec6 pack(const Vec3& v, const Vec3& u)
{
    Vec6 x;
    x << v, u;
    return x;
}

Configuration unpack(const Vec6& x)
{
    return {x.head<3>(), x.tail<3>()};
}

// Last two samples of a 6-vector signal for the BDF history terms.
struct History6 {
    Vec6 prev = Vec6::Zero();
    Vec6 prev2 = Vec6::Zero();
    int count = 0;

    void push(const Vec6& x)
    {
        prev2 = prev;
        prev = x;
        ++count;
    }

    Vec6 term(const BdfCoefficients& c) const { return c.w1 * prev + c.w2 * prev2; }
};

BdfCoefficients scheme(int count, double dt)
{
    return count <= 1 ? bdf1_coefficients(dt) : bdf2_coefficients(dt);
}

std::array<double, 4> quaternion(const Mat3& R)
{
    Eigen::Quaterniond q(R);
    q.normalize();
    if (q.w() < 0.0) {
        q.coeffs() *= -1.0;
    }
    return {q.w(), q.x(), q.y(), q.z()};
}

class Simulation {
public:
    explicit Simulation(const ScenarioConfig& cfg)
        : cfg_(cfg),
          params_(cfg.segment_params()),
          rod_(std::vector<MaterialParams>(static_cast<std::size_t>(cfg.segments), params_),
               cfg.nodes_per_segment),
          reference_(make_reference(cfg)),
          rng_(cfg.seed),
          segs_(rod_.segment_count()),
          local_(rod_.local_nodes()),
          nodes_(rod_.node_count()),
          preload_(0.0, 0.0, 4.0 * cfg.limits.p_min),
          est_hist_(nodes_)
    {
        for (std::size_t j = 0; j < segs_; ++j) {
            gains_.push_back(build_gains(params_, rod_.stiffness(j), cfg.gain(j)));
        }
        rest_ = pack(params_.v_star, params_.u_star);
        plant_x_.resize(segs_);
        plant_rate_.resize(segs_);
        meas_hist_.resize(segs_);
        model_rate_.resize(nodes_);
        p_d_.resize(segs_);
        lag_.resize(segs_);
        refs_.resize(nodes_);
        rest_strain_.resize(nodes_);
        loads_.resize(nodes_);
        new_rate_.resize(nodes_);
        measured_.resize(segs_);
    }

    TrackingResult run()
    {
        initialize();
        log_step(0.0);
        const long steps = cfg_.step_count();
        for (long i = 1; i <= steps; ++i) {
            step(i);
            if (i % cfg_.log_every == 0) {
                log_step(static_cast<double>(i) * cfg_.dt);
            }
        }
        return std::move(result_);
    }

private:
    double ds(std::size_t j) const { return rod_.ds(j); }

    Vec6 plant_config(std::size_t j) const { return plant_x_[j].prev; }

    std::vector<Configuration> plant_configs() const
    {
        std::vector<Configuration> out;
        for (std::size_t j = 0; j < segs_; ++j) {
            out.push_back(unpack(plant_config(j)));
        }
        return out;
    }

    void initialize()
    {
        for (std::size_t j = 0; j < segs_; ++j) {
            const ReferenceSample r = reference_(0.0, j, 0.0);
            Vec6 x = rest_;
            Vec6 x_t = Vec6::Zero();
            const Vec6 xr = pack(r.v, r.u);
            const Vec6 xr_t = pack(r.v_t, r.u_t);
            for (int c : kActuated) {
                x[c] = xr[c];
                x_t[c] = xr_t[c];
            }
            plant_x_[j].push(x);
            plant_rate_[j].push(x_t);
        }
        plant_states_ = kinematic_sweep(rod_, base_, plant_configs());
        measure();

        std::vector<RateSample> samples(nodes_);
        for (std::size_t j = 0; j < segs_; ++j) {
            for (std::size_t k = 0; k < local_; ++k) {
                const std::size_t idx = rod_.index(j, k);
                const ReferenceSample r = reference_(0.0, j, static_cast<double>(k) * ds(j));
                refs_[idx] = r;
                model_rate_[idx].push(pack(r.v_t, r.u_t));
                samples[idx].v = measured_[j].head<3>();
                samples[idx].u = measured_[j].tail<3>();
            }
        }
        est_hist_.push(samples);

        // Start in equilibrium: regulators already hold the pressures that
        // cancel the weight of the resting arm.
        const Wrench hold{-gravity_load(params_).f, Vec3::Zero()};
        for (std::size_t j = 0; j < segs_; ++j) {
            Vec3 sum = Vec3::Zero();
            for (std::size_t k = 0; k < local_; ++k) {
                const Mat3& R = meas_states_[rod_.index(j, k)].R;
                sum += wrench_to_equivalent(hold, R, params_).P;
            }
            p_d_[j] = equivalent_to_pressures({sum / static_cast<double>(local_) + preload_},
                                              cfg_.limits);
            lag_[j].p_m = p_d_[j];
            lag_[j].time_constant = cfg_.lag;
            result_.pressures_clamped = result_.pressures_clamped || p_d_[j].clamped;
        }
    }

    void step(long i)
    {
        const double t = static_cast<double>(i) * cfg_.dt;
        control(t);
        if (cfg_.estimator) {
            estimate(i);
        }
        for (std::size_t j = 0; j < segs_; ++j) {
            lag_[j] = lag_plant_step(lag_[j], p_d_[j], cfg_.dt);
        }
        advance_plant();
        measure();

        if (cfg_.estimator) {
            std::vector<RateSample> samples(nodes_);
            for (std::size_t j = 0; j < segs_; ++j) {
                for (std::size_t k = 0; k < local_; ++k) {
                    const std::size_t idx = rod_.index(j, k);
                    samples[idx].v = measured_[j].head<3>();
                    samples[idx].u = measured_[j].tail<3>();
                    samples[idx].q = estimate_.states[idx].q;
                    samples[idx].w = estimate_.states[idx].w;
                }
            }
            est_hist_.push(samples);
        }
        for (std::size_t idx = 0; idx < nodes_; ++idx) {
            model_rate_[idx].push(new_rate_[idx]);
        }
    }

    // Controller: per node prediction and control wrench in the measured
    // node frames, then per segment equivalent actuation and pressures.
    void control(double t)
    {
        const BdfCoefficients bc = scheme(meas_hist_[0].count, cfg_.dt);
        const Wrench weight = gravity_load(params_);
        for (std::size_t j = 0; j < segs_; ++j) {
            const Vec6 x_h = meas_hist_[j].term(bc);
            Vec3 sum = Vec3::Zero();
            for (std::size_t k = 0; k < local_; ++k) {
                const std::size_t idx = rod_.index(j, k);
                const ReferenceSample r = reference_(t, j, static_cast<double>(k) * ds(j));
                const PredictionHistory ph{bc.c0, x_h, model_rate_[idx].term(bc)};
                const Prediction pred = predict_configuration(r, ph, gains_[j]);
                const Mat3& R = meas_states_[idx].R;
                const Wrench w = control_wrench(r, pred.state, R, gains_[j], params_);
                sum += wrench_to_equivalent(w, R, params_).P;

                refs_[idx] = r;
                new_rate_[idx] = pack(pred.state.v_t, pred.state.u_t);
                rest_strain_[idx] = {pred.state.v, pred.state.u};
                loads_[idx] = {w.f + weight.f, w.l + weight.l};
            }
            p_d_[j] = equivalent_to_pressures({sum / static_cast<double>(local_) + preload_},
                                              cfg_.limits);
            result_.pressures_clamped = result_.pressures_clamped || p_d_[j].clamped;
        }
    }

    // Rod-level solve of the commanded loads around the predicted strains.
    void estimate(long i)
    {
        SweepProblem problem;
        problem.rod = &rod_;
        problem.base = base_;
        problem.loads = interpolated_loads(rod_, loads_);
        problem.time = {est_hist_.coefficients(cfg_.dt).c0, est_hist_.all_terms(cfg_.dt)};
        problem.rest = rest_strain_;
        try {
            estimate_ = shooting_solve(guess_, problem, cfg_.shooting);
        } catch (const NonConvergence& e) {
            char msg[128];
            std::snprintf(msg, sizeof(msg),
                          "shooting did not converge at step %ld (best residual %.3e)", i,
                          e.best_residual);
            throw NonConvergence(msg, e.best_residual);
        }
        guess_ = estimate_.base;
        result_.max_shooting_iterations =
            std::max(result_.max_shooting_iterations, estimate_.iterations);
        result_.max_shooting_residual =
            std::max(result_.max_shooting_residual, estimate_.residual_norm);
    }

    // Reduced plant: per segment, axial stretch and the two bending
    // curvatures driven by the delivered pressures and by gravity.
    void advance_plant()
    {
        const double rho_a = weight_per_length(params_);
        const Vec3 j_diag = params_.second_moment();
        const double area = params_.chamber_area;
        for (std::size_t j = 0; j < segs_; ++j) {
            const Vec3 P = pressures_to_equivalent(lag_[j].p_m).P - preload_;
            double axial_weight = 0.0;
            for (std::size_t k = 0; k < local_; ++k) {
                axial_weight += plant_states_[rod_.index(j, k)].R.col(2).dot(params_.g);
            }
            axial_weight *= rho_a / static_cast<double>(local_);

            Vec6 acc = Vec6::Zero();
            acc[kVz] = (area * P.z() + axial_weight) / rho_a;
            acc[kUx] = area * P.y() / (params_.rho * j_diag.x());
            acc[kUy] = area * P.x() / (params_.rho * j_diag.y());

            const BdfCoefficients bc = scheme(plant_x_[j].count, cfg_.dt);
            const Vec6 x_h = plant_x_[j].term(bc);
            const Vec6 x_th = plant_rate_[j].term(bc);
            Vec6 x = rest_;
            Vec6 x_t = Vec6::Zero();
            for (int c : kActuated) {
                x_t[c] = (acc[c] - x_th[c]) / bc.c0;
                x[c] = (x_t[c] - x_h[c]) / bc.c0;
            }
            plant_x_[j].push(x);
            plant_rate_[j].push(x_t);
        }
        plant_states_ = kinematic_sweep(rod_, base_, plant_configs());
    }

    // Tip pose of each segment in its base frame, through the constant
    // curvature map back to strains.
    void measure()
    {
        std::vector<Configuration> configs;
        for (std::size_t j = 0; j < segs_; ++j) {
            const NodeState& b = plant_states_[rod_.index(j, 0)];
            const NodeState& e = plant_states_[rod_.index(j, local_ - 1)];
            TipPose tip;
            tip.position = b.R.transpose() * (e.p - b.p);
            tip.R = b.R.transpose() * e.R;
            if (cfg_.noise_sigma > 0.0) {
                std::normal_distribution<double> noise(0.0, cfg_.noise_sigma);
                for (int a = 0; a < 3; ++a) {
                    tip.position[a] += noise(rng_);
                }
                // Noise leaves the bending plane; keep the dominant one.
                if (std::abs(tip.position.x()) < std::abs(tip.position.y())) {
                    tip.position.x() = 0.0;
                } else {
                    tip.position.y() = 0.0;
                }
            }
            const PlanarStrain s = pcc_to_config(tip_to_pcc(tip, cfg_.pcc_mode), params_.L0);
            Vec6 x = rest_;
            x[kVz] = s.v_z;
            x[kUx] = s.u_x;
            x[kUy] = s.u_y;
            measured_[j] = x;
            meas_hist_[j].push(x);
            configs.push_back(unpack(x));

            const Vec6 truth = plant_config(j);
            for (int c : kActuated) {
                result_.max_measurement_error =
                    std::max(result_.max_measurement_error, std::abs(x[c] - truth[c]));
            }
        }
        meas_states_ = kinematic_sweep(rod_, base_, configs);
    }

    void log_step(double t)
    {
        for (std::size_t j = 0; j < segs_; ++j) {
            const Configuration c = unpack(plant_config(j));
            for (std::size_t k = 0; k < local_; ++k) {
                const std::size_t idx = rod_.index(j, k);
                const NodeState& s = plant_states_[idx];
                LogRow row;
                row.t = t;
                row.seg = static_cast<int>(j) + 1;
                row.node = static_cast<int>(k);
                row.u = c.u;
                row.v = c.v;
                row.u_ref = refs_[idx].u;
                row.v_ref = refs_[idx].v;
                row.p = s.p;
                row.quat = quaternion(s.R);
                row.p_d = p_d_[j].p;
                row.p_m = lag_[j].p_m.p;
                row.iters = t > 0.0 ? estimate_.iterations : 0;
                row.residual = t > 0.0 ? estimate_.residual_norm : 0.0;
                result_.log.rows.push_back(row);
            }
        }
    }

    const ScenarioConfig& cfg_;
    MaterialParams params_;
    RodModel rod_;
    ReferenceSignal reference_;
    std::mt19937_64 rng_;
    std::size_t segs_;
    std::size_t local_;
    std::size_t nodes_;
    Vec3 preload_;
    Vec6 rest_;
    Pose base_;
    std::vector<GainSet> gains_;

    std::vector<History6> plant_x_;
    std::vector<History6> plant_rate_;
    std::vector<History6> meas_hist_;
    std::vector<History6> model_rate_;
    HistoryBuffer est_hist_;

    std::vector<NodeState> plant_states_;
    std::vector<NodeState> meas_states_;
    std::vector<Vec6> measured_;
    std::vector<ReferenceSample> refs_;
    std::vector<Configuration> rest_strain_;
    std::vector<Wrench> loads_;
    std::vector<Vec6> new_rate_;
    std::vector<ChamberPressures> p_d_;
    std::vector<LagPlantState> lag_;

    BaseWrench guess_;
    RodSweepResult estimate_;
    TrackingResult result_;
};

} // namespace

TrackingResult run_tracking(const ScenarioConfig& cfg)
{
    validate_config(cfg);
    Simulation sim(cfg);
    return sim.run();
}

double rmse(std::span<const double> series, std::span<const double> ref)
{
    if (series.empty() || series.size() != ref.size()) {
        throw InvalidParams("rmse needs two nonempty series of equal length");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const double d = series[i] - ref[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(series.size()));
}

namespace {

struct ChannelRef {
    bool is_u;
    int axis;
};

ChannelRef parse_channel(std::string_view name)
{
    if (name.size() == 2 && (name[0] == 'u' || name[0] == 'v') && name[1] >= 'x' && name[1] <= 'z') {
        return {name[0] == 'u', name[1] - 'x'};
    }
    throw ConfigError("unknown channel '" + std::string(name) + "'", "channel");
}

} // namespace

int segment_count(const TrajectoryLog& log)
{
    int n = 0;
    for (const auto& r : log.rows) {
        n = std::max(n, r.seg);
    }
    return n;
}

double channel_rmse(const TrajectoryLog& log, std::string_view channel, int seg)
{
    const ChannelRef ch = parse_channel(channel);
    int tip = -1;
    for (const auto& r : log.rows) {
        if (r.seg == seg) {
            tip = std::max(tip, r.node);
        }
    }
    if (tip < 0) {
        throw ConfigError("log has no rows for segment " + std::to_string(seg), "seg");
    }
    std::vector<double> series;
    std::vector<double> ref;
    for (const auto& r : log.rows) {
        if (r.seg == seg && r.node == tip) {
            series.push_back(ch.is_u ? r.u[ch.axis] : r.v[ch.axis]);
            ref.push_back(ch.is_u ? r.u_ref[ch.axis] : r.v_ref[ch.axis]);
        }
    }
    return rmse(series, ref);
}

namespace {

void put(std::string& line, double x)
{
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    line.append(buf, res.ptr);
    line.push_back(',');
}

void put(std::string& line, int x)
{
    line += std::to_string(x);
    line.push_back(',');
}

void put(std::string& line, const Vec3& v)
{
    put(line, v.x());
    put(line, v.y());
    put(line, v.z());
}

void put(std::string& line, const std::array<double, 4>& a)
{
    for (double x : a) {
        put(line, x);
    }
}

std::vector<std::string_view> split(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::vector<std::string_view> header_fields()
{
    return split(kLogHeader);
}

} // namespace

void write_log(const TrajectoryLog& log, std::ostream& out)
{
    out << kLogHeader << '\n';
    std::string line;
    for (const auto& r : log.rows) {
        line.clear();
        put(line, r.t);
        put(line, r.seg);
        put(line, r.node);
        put(line, r.u);
        put(line, r.v);
        put(line, r.u_ref);
        put(line, r.v_ref);
        put(line, r.p);
        put(line, r.quat);
        put(line, r.p_d);
        put(line, r.p_m);
        put(line, r.iters);
        put(line, r.residual);
        line.back() = '\n';
        out << line;
    }
}

TrajectoryLog read_log(std::istream& in)
{
    const auto names = header_fields();
    std::string line;
    if (!std::getline(in, line)) {
        throw ConfigError("log is empty", "header");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (line != kLogHeader) {
        throw ConfigError("log header does not match the expected columns", "header");
    }

    TrajectoryLog log;
    std::size_t row_no = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        ++row_no;
        const auto fields = split(line);
        if (fields.size() != names.size()) {
            throw ConfigError("row " + std::to_string(row_no) + ": expected "
                                  + std::to_string(names.size()) + " fields, got "
                                  + std::to_string(fields.size()),
                              "", row_no);
        }
        std::array<double, 32> x{};
        for (std::size_t i = 0; i < fields.size(); ++i) {
            const auto f = fields[i];
            const auto res = std::from_chars(f.data(), f.data() + f.size(), x[i]);
            if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
                const std::string field(names[i]);
                throw ConfigError("row " + std::to_string(row_no) + ": malformed value in field '"
                                      + field + "'",
                                  field, row_no);
            }
        }
        auto as_int = [&](std::size_t i) {
            if (x[i] != std::floor(x[i])) {
                const std::string field(names[i]);
                throw ConfigError("row " + std::to_string(row_no) + ": field '" + field
                                      + "' must be an integer",
                                  field, row_no);
            }
            return static_cast<int>(x[i]);
        };
        LogRow r;
        r.t = x[0];
        r.seg = as_int(1);
        r.node = as_int(2);
        r.u = Vec3(x[3], x[4], x[5]);
        r.v = Vec3(x[6], x[7], x[8]);
        r.u_ref = Vec3(x[9], x[10], x[11]);
        r.v_ref = Vec3(x[12], x[13], x[14]);
        r.p = Vec3(x[15], x[16], x[17]);
        r.quat = {x[18], x[19], x[20], x[21]};
        r.p_d = {x[22], x[23], x[24], x[25]};
        r.p_m = {x[26], x[27], x[28], x[29]};
        r.iters = as_int(30);
        r.residual = x[31];
        log.rows.push_back(r);
    }
    return log;
}

void emit_log(const TrajectoryLog& log, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write log file " + path.string());
    }
    write_log(log, out);
    if (!out) {
        throw IoError("failed writing log file " + path.string());
    }
}

TrajectoryLog load_log(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open log file " + path.string());
    }
    return read_log(in);
}

} // namespace softarm
