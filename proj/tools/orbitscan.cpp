// orbitscan: command-line front end for the scanning pipeline.
//
//   orbitscan simulate    --config <file> --out <dir>
//   orbitscan detect      --ply <file> --pose x,y,z,yaw [--eps --min-points --keep-fraction --depth-axis]
//   orbitscan plan        --target x,y,z --pose x,y,z,yaw [--n N | --spacing m] [--direction ccw|cw]
//   orbitscan reconstruct --bundle <file> --ply <out> [--report <out>] [--camera <file>] [--config <file>]
//   orbitscan config      (prints the default mission config)

#include "orbitscan/error.hpp"
#include "orbitscan/mission.hpp"
#include "orbitscan/serialization.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>

namespace {

using namespace orbitscan;

void emit(const Json& j, const std::string& out_path) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty()) {
        std::cout << text;
    } else {
        write_text_file(out_path, text);
    }
}

Pose pose_from_values(const std::vector<double>& v) { return {{v.at(0), v.at(1), v.at(2)}, wrap_angle(v.at(3))}; }

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
    const MissionConfig config = config_path.empty() ? MissionConfig{} : load_config(config_path);
    const MissionResult result = run(config);
    write_outputs(result, config, out_dir);
    const auto& state = result.report.final_state;
    if (state.phase != Phase::Done) {
        std::cerr << "mission aborted: " << state.reason << "\n";
        for (const auto& line : result.report.events) std::cerr << "  " << line << "\n";
        return 1;
    }
    std::cout << "mission Done after " << result.report.elapsed << " s; " << result.report.captures
              << " captures; outputs in " << out_dir << "\n";
    return 0;
}

int cmd_detect(const std::string& ply, const std::vector<double>& pose, const FilterParams& filter,
               const DbscanParams& params, const std::string& out) {
    SparseMapFrame frame;
    frame.points = read_ply(std::filesystem::path(ply));
    frame.drone_pose = pose_from_values(pose);
    const auto filtered = depth_filter(frame, filter);
    const ClusterResult clusters = dbscan(std::span<const MapPoint>(filtered), params);
    std::optional<Vec3> target;
    int status = 0;
    try {
        target = select_target(clusters, frame.drone_pose);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NoTarget) throw;
        std::cerr << e.what() << "\n";
        status = 1;
    }
    emit(detection_to_json(filtered, clusters, target), out);
    return status;
}

int cmd_plan(const std::vector<double>& target, const std::vector<double>& pose, int n, double spacing,
             const std::string& direction, const std::string& out) {
    PlannerParams params;
    params.waypoint_count = n;
    params.arc_spacing = spacing;
    params.direction = direction == "cw" ? OrbitDirection::Clockwise : OrbitDirection::CounterClockwise;
    const OrbitPlan plan = plan_orbit({target.at(0), target.at(1), target.at(2)}, pose_from_values(pose), params);
    emit(plan_to_json(plan), out);
    return 0;
}

struct ReconstructArgs {
    std::string bundle, camera, config, ply, report, mode = "dense";
    bool oracle_poses = false;
    int overlap_min = 8;
};

int cmd_reconstruct(const ReconstructArgs& a) {
    const CaptureBundle bundle = read_capture_bundle(a.bundle);
    std::optional<MissionConfig> config;
    if (!a.config.empty()) config = load_config(a.config);

    CameraIntrinsics cam;
    if (!a.camera.empty()) {
        cam = camera_from_json(read_json_file(a.camera));
    } else if (bundle.camera) {
        cam = *bundle.camera;
    } else if (config) {
        cam = config->camera;
    }

    ReconstructionOptions options;
    options.mode = a.mode == "sparse" ? ReconstructionMode::Sparse : ReconstructionMode::Dense;
    options.oracle_poses = a.oracle_poses;
    options.overlap_min = a.overlap_min;
    options.sparse_ids = bundle.sparse_map_ids;

    const DenseCloud cloud = reconstruct(bundle.set, cam, options);
    export_ply(cloud, a.ply);

    Json report{{"points", cloud.points.size()},
                {"candidate_ids", cloud.stats.candidate_ids},
                {"single_view", cloud.stats.single_view},
                {"degenerate", cloud.stats.degenerate},
                {"ply_file", a.ply}};
    if (config) {
        const Scene scene = generate_scene(config->scene, config->seed);
        Json q = quality_to_json(score(cloud, scene), cloud.stats);
        q["observable_completeness"] = coverage(cloud, observable_object_ids(bundle.set, scene));
        report["quality"] = q;
    }
    emit(report, a.report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Autonomous object scanning simulator: map, detect, orbit, capture, reconstruct"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "orbitscan_out";
    auto* simulate = app.add_subcommand("simulate", "Run a full mission and write report, PLY and capture bundle");
    simulate->add_option("--config", config_path, "Mission config (JSON)")->check(CLI::ExistingFile);
    simulate->add_option("--out", out_dir, "Output directory");

    std::string ply_in, detect_out;
    std::vector<double> pose;
    FilterParams filter;
    DbscanParams dbscan_params;
    std::string depth_axis = "view_axis";
    auto* detect_cmd = app.add_subcommand("detect", "Cluster a point cloud and pick the closest target");
    detect_cmd->add_option("--ply", ply_in, "ASCII PLY point cloud")->required()->check(CLI::ExistingFile);
    detect_cmd->add_option("--pose", pose, "Drone pose x,y,z,yaw")->required()->expected(4)->delimiter(',');
    detect_cmd->add_option("--eps", dbscan_params.eps, "Neighborhood radius (m)");
    detect_cmd->add_option("--min-points", dbscan_params.min_points, "Core point threshold (strict)");
    detect_cmd->add_option("--keep-fraction", filter.keep_fraction, "Fraction of closest points kept");
    detect_cmd->add_option("--depth-axis", depth_axis, "view_axis or world_y")
        ->check(CLI::IsMember({"view_axis", "world_y"}));
    detect_cmd->add_option("--out", detect_out, "Write JSON here instead of stdout");

    std::vector<double> target, plan_pose;
    int n = 12;
    double spacing = 0.0;
    std::string direction = "ccw", plan_out;
    auto* plan_cmd = app.add_subcommand("plan", "Plan a circular waypoint orbit");
    plan_cmd->add_option("--target", target, "Target x,y,z")->required()->expected(3)->delimiter(',');
    plan_cmd->add_option("--pose", plan_pose, "Drone pose x,y,z,yaw")->required()->expected(4)->delimiter(',');
    plan_cmd->add_option("--n", n, "Number of waypoints");
    plan_cmd->add_option("--spacing", spacing, "Arc length per waypoint; overrides --n");
    plan_cmd->add_option("--direction", direction, "ccw or cw")->check(CLI::IsMember({"ccw", "cw"}));
    plan_cmd->add_option("--out", plan_out, "Write JSON here instead of stdout");

    ReconstructArgs rec;
    auto* rec_cmd = app.add_subcommand("reconstruct", "Triangulate a capture bundle into a PLY cloud");
    rec_cmd->add_option("--bundle", rec.bundle, "Capture bundle (JSON)")->required()->check(CLI::ExistingFile);
    rec_cmd->add_option("--ply", rec.ply, "Output PLY path")->required();
    rec_cmd->add_option("--report", rec.report, "Quality report path (default stdout)");
    rec_cmd->add_option("--camera", rec.camera, "Camera intrinsics (JSON)")->check(CLI::ExistingFile);
    rec_cmd->add_option("--config", rec.config, "Mission config; enables ground-truth scoring")
        ->check(CLI::ExistingFile);
    rec_cmd->add_option("--mode", rec.mode, "dense or sparse")->check(CLI::IsMember({"dense", "sparse"}));
    rec_cmd->add_flag("--oracle-poses", rec.oracle_poses, "Use ground-truth capture poses");
    rec_cmd->add_option("--overlap-min", rec.overlap_min, "Shared ids needed for an overlap edge");

    auto* config_cmd = app.add_subcommand("config", "Print the default mission config");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*simulate) return cmd_simulate(config_path, out_dir);
        if (*detect_cmd) {
            filter.depth_axis = depth_axis == "world_y" ? DepthAxis::WorldY : DepthAxis::ViewAxis;
            return cmd_detect(ply_in, pose, filter, dbscan_params, detect_out);
        }
        if (*plan_cmd) return cmd_plan(target, plan_pose, n, spacing, direction, plan_out);
        if (*rec_cmd) return cmd_reconstruct(rec);
        if (*config_cmd) {
            std::cout << config_to_json(MissionConfig{}).dump(2) << "\n";
            return 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
