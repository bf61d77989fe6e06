#pragma once

#include "orbitscan/capture.hpp"
#include "orbitscan/detector.hpp"
#include "orbitscan/mission.hpp"
#include "orbitscan/planner.hpp"
#include "orbitscan/reconstructor.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <vector>

namespace orbitscan {

using Json = nlohmann::ordered_json;

// Mission config. Every key is optional and falls back to the defaults in
// MissionConfig; unknown keys are rejected with ParseError.
MissionConfig config_from_json(const Json& j);
Json config_to_json(const MissionConfig& config);
MissionConfig load_config(const std::filesystem::path& path);

CameraIntrinsics camera_from_json(const Json& j);
Json camera_to_json(const CameraIntrinsics& cam);

Json pose_to_json(const Pose& pose);
Pose pose_from_json(const Json& j);

// Capture bundle: the hand-off between capture and reconstruction.
struct CaptureBundle {
    CaptureSet set;
    std::optional<CameraIntrinsics> camera;
    std::vector<int> sparse_map_ids;
};

Json bundle_to_json(const CaptureBundle& bundle);
CaptureBundle bundle_from_json(const Json& j);
void write_capture_bundle(const CaptureBundle& bundle, const std::filesystem::path& path);
CaptureBundle read_capture_bundle(const std::filesystem::path& path);

Json detection_to_json(const std::vector<MapPoint>& filtered, const ClusterResult& result,
                       const std::optional<Vec3>& target);
Json plan_to_json(const OrbitPlan& plan);
Json quality_to_json(const QualityReport& quality, const ReconstructionStats& stats);
Json report_to_json(const MissionReport& report);

/// Reads a whole file as JSON, mapping I/O and syntax failures to Error.
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace orbitscan
