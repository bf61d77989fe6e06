#pragma once

#include "orbitscan/capture.hpp"
#include "orbitscan/controller.hpp"
#include "orbitscan/detector.hpp"
#include "orbitscan/planner.hpp"
#include "orbitscan/reconstructor.hpp"
#include "orbitscan/simworld.hpp"
#include "orbitscan/vehicle.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace orbitscan {

enum class Phase { Idle, Mapping, Detecting, Orbiting, Reconstructing, Done, Aborted };

std::string_view to_string(Phase phase);

struct MissionState {
    Phase phase = Phase::Idle;
    int waypoint = 0;        // Orbiting only
    int waypoint_count = 0;  // Orbiting only
    std::string reason;      // Aborted only

    bool terminal() const { return phase == Phase::Done || phase == Phase::Aborted; }
    std::string describe() const;

    friend bool operator==(const MissionState&, const MissionState&) = default;
};

struct MissionEvent {
    enum class Kind { Start, MapReady, TargetFound, WaypointReached, ReconstructionDone, Abort };
    Kind kind = Kind::Start;
    int waypoint_count = 0;  // TargetFound
    std::string reason;      // Abort

    static MissionEvent start() { return {Kind::Start, 0, {}}; }
    static MissionEvent map_ready() { return {Kind::MapReady, 0, {}}; }
    static MissionEvent target_found(int waypoints) { return {Kind::TargetFound, waypoints, {}}; }
    static MissionEvent waypoint_reached() { return {Kind::WaypointReached, 0, {}}; }
    static MissionEvent reconstruction_done() { return {Kind::ReconstructionDone, 0, {}}; }
    static MissionEvent abort(std::string why) { return {Kind::Abort, 0, std::move(why)}; }
};

std::string_view to_string(MissionEvent::Kind kind);

/// Idle -> Mapping -> Detecting -> Orbiting(0..n-1) -> Reconstructing -> Done,
/// with Abort accepted from every non-terminal state. Anything else throws
/// IllegalTransition.
MissionState transition(const MissionState& state, const MissionEvent& event);

struct NoiseConfig {
    double map_sigma = 0.02;              // m, sparse-map point noise
    double pixel_sigma = 0.5;             // px
    double vision_position_sigma = 0.01;  // m
    double vision_yaw_sigma = 0.005;      // rad
};

struct TimeoutConfig {
    double mapping = 10.0;  // mapping ends (successfully) after this long
    double detecting = 5.0;
    double orbiting = 100.0;
};

struct MissionConfig {
    std::uint64_t seed = 7;
    double dt = 1.0 / 30.0;
    SceneSpec scene;
    CameraIntrinsics camera;
    Pose start_pose{{0.0, 0.0, 1.0}, 0.0};
    NoiseConfig noise;

    FilterParams filter;
    DbscanParams dbscan;
    int min_map_points = 300;

    PlannerParams planner;
    Gains gains;
    Clamps clamps;
    Tolerances tolerances;

    VehicleParams vehicle;
    EstimatorParams estimator;
    AxisVariance initial_variance;
    VisionParams vision;
    std::vector<std::pair<double, double>> vision_dropouts;  // forced [start, end) windows, seconds

    ReconstructionMode mode = ReconstructionMode::Dense;
    int overlap_min = 8;
    bool oracle_poses = false;

    TimeoutConfig timeouts;

    /// Throws InvalidSpec on out-of-range values.
    void validate() const;
};

struct TransitionRecord {
    double time = 0.0;
    std::string from;
    std::string event;
    std::string to;
};

/// Per-tick telemetry; kept in memory only.
struct TickRecord {
    double time = 0.0;
    Phase phase = Phase::Idle;
    Pose truth;
    Pose estimate;
    AxisVariance variance;
    ControlCommand command;
    bool vision = false;
};

struct MissionReport {
    MissionState final_state;
    std::vector<std::pair<std::string, double>> state_durations;
    double elapsed = 0.0;
    int ticks = 0;

    std::size_t map_points = 0;
    std::optional<Vec3> target;
    std::optional<Vec3> true_centroid;
    std::optional<double> detection_error;

    int waypoints_planned = 0;
    int waypoints_reached = 0;
    int captures = 0;
    int duplicate_captures = 0;
    double orbit_radius = 0.0;

    double max_commanded_yaw_rate = 0.0;
    double max_estimate_error = 0.0;
    int vision_lost_ticks = 0;

    std::optional<QualityReport> quality;
    std::optional<double> observable_completeness;
    std::optional<ReconstructionStats> reconstruction_stats;
    std::string ply_file;

    std::vector<TransitionRecord> transitions;
    std::vector<std::string> events;
};

struct MissionResult {
    MissionReport report;
    Scene scene;
    SparseMapFrame sparse_map;
    CaptureSet captures;
    std::optional<DenseCloud> cloud;
    std::vector<TickRecord> trace;
};

/// Runs the whole pipeline on a deterministic fixed-step loop. Stage failures
/// end in Aborted with the failure named in the reason; nothing is thrown for a
/// valid config.
MissionResult run(const MissionConfig& config);

/// Writes report.json and events.log into `directory`.
void emit_report(const MissionReport& report, const std::filesystem::path& directory);

/// emit_report plus reconstruction.ply, sparse_map.ply and capture_bundle.json.
void write_outputs(const MissionResult& result, const MissionConfig& config, const std::filesystem::path& directory);

}  // namespace orbitscan
