#include "orbitscan/mission.hpp"

#include "orbitscan/error.hpp"
#include "orbitscan/serialization.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <limits>
#include <sstream>

namespace orbitscan {

std::string_view to_string(Phase phase) {
    switch (phase) {
        case Phase::Idle: return "Idle";
        case Phase::Mapping: return "Mapping";
        case Phase::Detecting: return "Detecting";
        case Phase::Orbiting: return "Orbiting";
        case Phase::Reconstructing: return "Reconstructing";
        case Phase::Done: return "Done";
        case Phase::Aborted: return "Aborted";
    }
    return "Unknown";
}

std::string_view to_string(MissionEvent::Kind kind) {
    switch (kind) {
        case MissionEvent::Kind::Start: return "Start";
        case MissionEvent::Kind::MapReady: return "MapReady";
        case MissionEvent::Kind::TargetFound: return "TargetFound";
        case MissionEvent::Kind::WaypointReached: return "WaypointReached";
        case MissionEvent::Kind::ReconstructionDone: return "ReconstructionDone";
        case MissionEvent::Kind::Abort: return "Abort";
    }
    return "Unknown";
}

std::string MissionState::describe() const {
    std::string s(to_string(phase));
    if (phase == Phase::Orbiting) s += "(" + std::to_string(waypoint) + ")";
    if (phase == Phase::Aborted) s += "(" + reason + ")";
    return s;
}

MissionState transition(const MissionState& state, const MissionEvent& event) {
    using Kind = MissionEvent::Kind;
    auto illegal = [&] {
        return Error(ErrorCode::IllegalTransition,
                     std::string(to_string(event.kind)) + " is not accepted in state " + state.describe());
    };
    if (state.terminal()) throw illegal();
    if (event.kind == Kind::Abort) return {Phase::Aborted, 0, 0, event.reason};

    switch (state.phase) {
        case Phase::Idle:
            if (event.kind == Kind::Start) return {Phase::Mapping, 0, 0, {}};
            break;
        case Phase::Mapping:
            if (event.kind == Kind::MapReady) return {Phase::Detecting, 0, 0, {}};
            break;
        case Phase::Detecting:
            if (event.kind == Kind::TargetFound && event.waypoint_count >= 1) {
                return {Phase::Orbiting, 0, event.waypoint_count, {}};
            }
            break;
        case Phase::Orbiting:
            if (event.kind == Kind::WaypointReached) {
                if (state.waypoint + 1 < state.waypoint_count) {
                    return {Phase::Orbiting, state.waypoint + 1, state.waypoint_count, {}};
                }
                return {Phase::Reconstructing, 0, 0, {}};
            }
            break;
        case Phase::Reconstructing:
            if (event.kind == Kind::ReconstructionDone) return {Phase::Done, 0, 0, {}};
            break;
        default:
            break;
    }
    throw illegal();
}

void MissionConfig::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorCode::InvalidSpec, what);
    };
    require(dt > 0.0 && std::isfinite(dt), "dt must be positive");
    camera.validate();
    filter.validate();
    dbscan.validate();
    gains.validate();
    require(clamps.vx > 0.0 && clamps.vy > 0.0 && clamps.vz > 0.0 && clamps.vyaw > 0.0, "clamps must be positive");
    require(tolerances.position > 0.0 && tolerances.yaw > 0.0, "tolerances must be positive");
    require(min_map_points >= 1, "min_map_points must be at least 1");
    require(planner.waypoint_count >= 2 || planner.arc_spacing > 0.0, "an orbit needs at least two waypoints");
    require(noise.map_sigma >= 0.0 && noise.pixel_sigma >= 0.0, "noise levels must be non-negative");
    require(noise.vision_position_sigma > 0.0 && noise.vision_yaw_sigma > 0.0,
            "vision measurement noise must be positive");
    require(estimator.q >= 0.0 && estimator.q_yaw >= 0.0, "process noise must be non-negative");
    require(vehicle.velocity_lag >= 0.0 && estimator.velocity_lag >= 0.0, "velocity lag must be non-negative");
    require(overlap_min >= 1, "overlap_min must be at least 1");
    require(timeouts.mapping >= 0.0 && timeouts.detecting >= 0.0 && timeouts.orbiting >= 0.0,
            "timeouts must be non-negative");
    require(start_pose.position.finite() && std::isfinite(start_pose.yaw), "start pose must be finite");
}

namespace {

constexpr std::array kTrackedPhases{Phase::Mapping, Phase::Detecting, Phase::Orbiting, Phase::Reconstructing};

Rng mission_rng(std::uint64_t seed) {
    // Separate stream from the scene generator, which seeds with `seed` directly.
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x6d697373u};
    return Rng(seq);
}

std::string format_time(double t) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", t);
    return buf;
}

class MissionRunner {
public:
    explicit MissionRunner(const MissionConfig& config)
        : cfg_(config), rng_(mission_rng(config.seed)) {}

    MissionResult run() {
        try {
            cfg_.validate();
            result_.scene = generate_scene(cfg_.scene, cfg_.seed);
        } catch (const Error& e) {
            fire(MissionEvent::abort(std::string(to_string(e.code()))), e.what());
            return finish();
        }
        truth_.pose = cfg_.start_pose;
        estimate_.pose_estimate = cfg_.start_pose;
        estimate_.variance = cfg_.initial_variance;

        fire(MissionEvent::start());
        while (!state_.terminal()) tick();
        return finish();
    }

private:
    void fire(const MissionEvent& event, const std::string& detail = {}) {
        const MissionState next = transition(state_, event);
        result_.report.transitions.push_back(
            {time_, state_.describe(), std::string(to_string(event.kind)), next.describe()});
        log(state_.describe() + " --" + std::string(to_string(event.kind)) + "--> " + next.describe() +
            (detail.empty() ? "" : " [" + detail + "]"));
        if (next.phase != state_.phase) {
            durations_[static_cast<std::size_t>(state_.phase)] += time_ - phase_start_;
            phase_start_ = time_;
        }
        state_ = next;
    }

    void log(const std::string& line) { result_.report.events.push_back("t=" + format_time(time_) + " " + line); }

    void abort_with(const Error& e) { fire(MissionEvent::abort(std::string(to_string(e.code()))), e.what()); }

    bool forced_dropout() const {
        return std::any_of(cfg_.vision_dropouts.begin(), cfg_.vision_dropouts.end(),
                           [&](const auto& w) { return time_ >= w.first && time_ < w.second; });
    }

    double phase_time() const { return time_ - phase_start_; }

    void tick() {
        // Sense: sparse map frame and vision-based pose fix.
        SparseMapFrame frame = observe(result_.scene, truth_.pose, cfg_.camera, cfg_.noise.map_sigma, rng_, ticks_);
        const int visible = static_cast<int>(frame.points.size());
        const bool vision = !forced_dropout() && vision_gate(truth_, visible, cfg_.vision);
        if (vision) {
            std::normal_distribution<double> n(0.0, 1.0);
            Pose measured = truth_.pose;
            measured.position += cfg_.noise.vision_position_sigma * Vec3{n(rng_), n(rng_), n(rng_)};
            measured.yaw = wrap_angle(measured.yaw + cfg_.noise.vision_yaw_sigma * n(rng_));
            estimate_ = update(estimate_, measured, cfg_.noise.vision_position_sigma * cfg_.noise.vision_position_sigma,
                               cfg_.noise.vision_yaw_sigma * cfg_.noise.vision_yaw_sigma);
            frame.drone_pose = estimate_.pose_estimate;
            map_.integrate(frame);
        } else {
            estimate_.vision_available = false;
            ++result_.report.vision_lost_ticks;
        }
        if (vision != last_vision_) {
            log(vision ? "vision tracking regained" : "vision tracking lost, dead reckoning");
            last_vision_ = vision;
        }

        ControlCommand cmd{};
        switch (state_.phase) {
            case Phase::Mapping: mapping(); break;
            case Phase::Detecting: detecting(); break;
            case Phase::Orbiting: cmd = orbiting(); break;
            default: break;
        }
        if (state_.phase == Phase::Reconstructing) reconstructing();

        result_.trace.push_back(
            {time_, state_.phase, truth_.pose, estimate_.pose_estimate, estimate_.variance, cmd, vision});
        if (state_.phase == Phase::Orbiting) {
            result_.report.max_commanded_yaw_rate = std::max(result_.report.max_commanded_yaw_rate, std::abs(cmd.vyaw));
            result_.report.max_estimate_error = std::max(
                result_.report.max_estimate_error, distance(truth_.pose.position, estimate_.pose_estimate.position));
        }

        if (state_.terminal()) return;

        // Act.
        truth_ = step_dynamics(truth_, cmd, cfg_.dt, cfg_.vehicle);
        estimate_ = predict(estimate_, cmd, cfg_.dt, cfg_.estimator);
        ++ticks_;
        time_ = ticks_ * cfg_.dt;
    }

    void mapping() {
        const bool enough = map_.size() >= static_cast<std::size_t>(cfg_.min_map_points);
        const bool timed_out = phase_time() >= cfg_.timeouts.mapping;
        if (!enough && !timed_out) return;
        if (map_.size() == 0) {
            fire(MissionEvent::abort("EmptyMap"), "no map points after mapping timeout");
            return;
        }
        fire(MissionEvent::map_ready(), std::to_string(map_.size()) + " map points");
    }

    void detecting() {
        const SparseMapFrame snapshot = map_.snapshot(estimate_.pose_estimate, ticks_);
        try {
            const Detection d = detect(snapshot, cfg_.filter, cfg_.dbscan);
            plan_ = plan_orbit(d.target, estimate_.pose_estimate, cfg_.planner);
            auto& r = result_.report;
            r.map_points = snapshot.points.size();
            r.target = d.target;
            r.waypoints_planned = static_cast<int>(plan_.waypoints.size());
            r.orbit_radius = plan_.radius;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& o : result_.scene.objects) {
                if (distance(o.centroid, d.target) < best) {
                    best = distance(o.centroid, d.target);
                    r.true_centroid = o.centroid;
                }
            }
            if (r.true_centroid) r.detection_error = best;
            result_.sparse_map = snapshot;
            char buf[128];
            std::snprintf(buf, sizeof(buf), "target (%.4f, %.4f, %.4f), %zu clusters, radius %.4f m", d.target.x,
                          d.target.y, d.target.z, d.clusters.clusters.size(), plan_.radius);
            fire(MissionEvent::target_found(static_cast<int>(plan_.waypoints.size())), buf);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::DegenerateOrbit) {
                abort_with(e);
            } else if (phase_time() >= cfg_.timeouts.detecting) {
                result_.sparse_map = snapshot;
                result_.report.map_points = snapshot.points.size();
                abort_with(e);
            }
        }
    }

    ControlCommand orbiting() {
        CaptureFrame camera;
        camera.observations = render_view(result_.scene, truth_.pose, cfg_.camera, cfg_.noise.pixel_sigma, rng_);
        camera.pose_estimate = estimate_.pose_estimate;
        camera.pose_truth = truth_.pose;
        buffer_ = on_frame(std::move(buffer_), std::move(camera));

        if (phase_time() >= cfg_.timeouts.orbiting) {
            fire(MissionEvent::abort("OrbitTimeout"),
                 "waypoint " + std::to_string(state_.waypoint) + " not reached in time");
            return {};
        }

        const Waypoint& wp = plan_.waypoints[static_cast<std::size_t>(state_.waypoint)];
        if (waypoint_reached(wp, estimate_.pose_estimate, cfg_.tolerances)) {
            try {
                result_.captures = on_waypoint_reached(buffer_, std::move(result_.captures), wp.index);
            } catch (const Error& e) {
                abort_with(e);
                return {};
            }
            const auto& saved = result_.captures.frames.back();
            ++result_.report.waypoints_reached;
            fire(MissionEvent::waypoint_reached(), "captured " + std::to_string(saved.observations.size()) +
                                                       " observations at waypoint " + std::to_string(wp.index));
            if (state_.phase != Phase::Orbiting) return {};
        }
        const Waypoint& target = plan_.waypoints[static_cast<std::size_t>(state_.waypoint)];
        return control_step(target, estimate_.pose_estimate, cfg_.gains, cfg_.clamps);
    }

    void reconstructing() {
        auto& r = result_.report;
        r.captures = static_cast<int>(result_.captures.frames.size());
        r.duplicate_captures = static_cast<int>(std::count_if(result_.captures.frames.begin(),
                                                              result_.captures.frames.end(),
                                                              [](const CaptureFrame& f) { return f.duplicate_of_latest; }));
        try {
            ReconstructionOptions options;
            options.mode = cfg_.mode;
            options.oracle_poses = cfg_.oracle_poses;
            options.overlap_min = cfg_.overlap_min;
            for (const auto& p : result_.sparse_map.points) options.sparse_ids.push_back(p.id);
            DenseCloud cloud = reconstruct(result_.captures, cfg_.camera, options);
            r.quality = score(cloud, result_.scene);
            r.reconstruction_stats = cloud.stats;
            const auto observable = observable_object_ids(result_.captures, result_.scene);
            r.observable_completeness = coverage(cloud, observable);
            r.ply_file = "reconstruction.ply";
            result_.cloud = std::move(cloud);
            fire(MissionEvent::reconstruction_done(), std::to_string(result_.cloud->points.size()) + " points");
        } catch (const Error& e) {
            abort_with(e);
        }
    }

    MissionResult finish() {
        auto& r = result_.report;
        r.final_state = state_;
        r.elapsed = time_;
        r.ticks = ticks_;
        for (Phase p : kTrackedPhases) {
            r.state_durations.emplace_back(std::string(to_string(p)), durations_[static_cast<std::size_t>(p)]);
        }
        if (r.captures == 0) r.captures = static_cast<int>(result_.captures.frames.size());
        return std::move(result_);
    }

    MissionConfig cfg_;
    Rng rng_;
    MissionResult result_;
    MissionState state_;
    VehicleState truth_;
    EstimatorState estimate_;
    SparseMap map_;
    OrbitPlan plan_;
    FrameBuffer buffer_;
    std::array<double, 7> durations_{};
    double time_ = 0.0;
    double phase_start_ = 0.0;
    int ticks_ = 0;
    bool last_vision_ = true;
};

}  // namespace

MissionResult run(const MissionConfig& config) { return MissionRunner(config).run(); }

void emit_report(const MissionReport& report, const std::filesystem::path& directory) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + directory.string() + ": " + ec.message());
    write_text_file(directory / "report.json", report_to_json(report).dump(2) + "\n");
    std::ostringstream log;
    for (const auto& line : report.events) log << line << '\n';
    write_text_file(directory / "events.log", log.str());
}

void write_outputs(const MissionResult& result, const MissionConfig& config, const std::filesystem::path& directory) {
    emit_report(result.report, directory);
    if (result.cloud) export_ply(*result.cloud, directory / result.report.ply_file);
    std::vector<Vec3> map_points;
    std::vector<int> map_ids;
    for (const auto& p : result.sparse_map.points) {
        map_points.push_back(p.position);
        map_ids.push_back(p.id);
    }
    export_ply(std::span<const Vec3>(map_points), directory / "sparse_map.ply", map_ids);

    CaptureBundle bundle;
    bundle.set = result.captures;
    bundle.camera = config.camera;
    for (const auto& p : result.sparse_map.points) bundle.sparse_map_ids.push_back(p.id);
    write_capture_bundle(bundle, directory / "capture_bundle.json");
}

}  // namespace orbitscan
