#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "softarm/scenario.hpp"

namespace softarm {

inline constexpr std::string_view kLogHeader =
    "t,seg,node,ux,uy,uz,vx,vy,vz,ux_ref,uy_ref,uz_ref,vx_ref,vy_ref,vz_ref,"
    "px,py,pz,qw,qx,qy,qz,pd1,pd2,pd3,pd4,pm1,pm2,pm3,pm4,iters,residual";

// One node at one time step. Segments are numbered from 1, nodes from 0
// within their segment; the junction node is listed under both segments.
struct LogRow {
    double t = 0.0;
    int seg = 1;
    int node = 0;
    Vec3 u = Vec3::Zero();
    Vec3 v = Vec3::Zero();
    Vec3 u_ref = Vec3::Zero();
    Vec3 v_ref = Vec3::Zero();
    Vec3 p = Vec3::Zero();
    std::array<double, 4> quat{1.0, 0.0, 0.0, 0.0};   // w, x, y, z
    std::array<double, 4> p_d{};
    std::array<double, 4> p_m{};
    int iters = 0;
    double residual = 0.0;

    bool operator==(const LogRow&) const = default;
};

struct TrajectoryLog {
    std::vector<LogRow> rows;
};

struct TrackingResult {
    TrajectoryLog log;
    // Largest deviation between the measured and true planar strains
    // (u_x, u_y, v_z) over the run.
    double max_measurement_error = 0.0;
    int max_shooting_iterations = 0;
    double max_shooting_residual = 0.0;
    bool pressures_clamped = false;
};

TrackingResult run_tracking(const ScenarioConfig& cfg);

double rmse(std::span<const double> series, std::span<const double> ref);

// RMSE of one strain channel ("ux", ..., "vz") against its reference at the
// tip node of segment `seg` (1-based).
double channel_rmse(const TrajectoryLog& log, std::string_view channel, int seg);
int segment_count(const TrajectoryLog& log);

void write_log(const TrajectoryLog& log, std::ostream& out);
TrajectoryLog read_log(std::istream& in);
void emit_log(const TrajectoryLog& log, const std::filesystem::path& path);
TrajectoryLog load_log(const std::filesystem::path& path);

} // namespace softarm
