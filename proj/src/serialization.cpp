#include "orbitscan/serialization.hpp"

#include "orbitscan/error.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <string>

namespace orbitscan {

namespace {

Json vec3_to_json(Vec3 v) { return Json::array({v.x, v.y, v.z}); }

Vec3 vec3_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 3) throw Error(ErrorCode::ParseError, "expected [x, y, z], got " + j.dump());
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

// Reads optional keys of one JSON object and rejects any key it did not consume.
class ObjectReader {
public:
    ObjectReader(const Json& j, std::string context) : j_(j), context_(std::move(context)) {
        if (!j_.is_object()) throw Error(ErrorCode::ParseError, context_ + ": expected an object");
    }

    template <typename T>
    void read(const char* key, T& out) {
        if (!j_.contains(key)) return;
        seen_.insert(key);
        try {
            out = j_.at(key).get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ParseError, context_ + "." + key + ": " + e.what());
        }
    }

    void read_vec3(const char* key, Vec3& out) {
        if (!j_.contains(key)) return;
        seen_.insert(key);
        out = vec3_from_json(j_.at(key));
    }

    const Json* child(const char* key) {
        if (!j_.contains(key)) return nullptr;
        seen_.insert(key);
        return &j_.at(key);
    }

    std::string path(const char* key) const { return context_ + "." + key; }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.contains(key)) throw Error(ErrorCode::ParseError, context_ + ": unknown key '" + key + "'");
        }
    }

private:
    const Json& j_;
    std::string context_;
    std::set<std::string> seen_;
};

const char* mode_name(ReconstructionMode m) { return m == ReconstructionMode::Sparse ? "sparse" : "dense"; }
const char* axis_name(DepthAxis a) { return a == DepthAxis::WorldY ? "world_y" : "view_axis"; }
const char* direction_name(OrbitDirection d) { return d == OrbitDirection::Clockwise ? "cw" : "ccw"; }

template <typename Enum>
Enum parse_enum(const std::string& value, std::initializer_list<std::pair<const char*, Enum>> options,
                const std::string& context) {
    for (const auto& [name, e] : options) {
        if (value == name) return e;
    }
    throw Error(ErrorCode::ParseError, context + ": unrecognized value '" + value + "'");
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json pose_to_json(const Pose& pose) {
    return Json{{"x", pose.position.x}, {"y", pose.position.y}, {"z", pose.position.z}, {"yaw", pose.yaw}};
}

Pose pose_from_json(const Json& j) {
    Pose p;
    ObjectReader r(j, "pose");
    r.read("x", p.position.x);
    r.read("y", p.position.y);
    r.read("z", p.position.z);
    r.read("yaw", p.yaw);
    r.finish();
    return p;
}

Json camera_to_json(const CameraIntrinsics& cam) {
    return Json{{"fx", cam.fx}, {"fy", cam.fy}, {"cx", cam.cx},       {"cy", cam.cy},
                {"k1", cam.k1}, {"k2", cam.k2}, {"width", cam.width}, {"height", cam.height}};
}

CameraIntrinsics camera_from_json(const Json& j) {
    CameraIntrinsics cam;
    ObjectReader r(j, "camera");
    r.read("fx", cam.fx);
    r.read("fy", cam.fy);
    r.read("cx", cam.cx);
    r.read("cy", cam.cy);
    r.read("k1", cam.k1);
    r.read("k2", cam.k2);
    r.read("width", cam.width);
    r.read("height", cam.height);
    r.finish();
    cam.validate();
    return cam;
}

static MissionConfig config_from_json_impl(const Json& j) {
    MissionConfig c;
    ObjectReader root(j, "config");
    root.read("seed", c.seed);
    root.read("dt", c.dt);

    if (const Json* scene = root.child("scene")) {
        ObjectReader r(*scene, "scene");
        if (const Json* objects = r.child("objects")) {
            if (!objects->is_array()) throw Error(ErrorCode::ParseError, "scene.objects: expected an array");
            c.scene.objects.clear();
            for (const auto& o : *objects) {
                ObjectSpec spec;
                ObjectReader ro(o, "scene.objects[]");
                ro.read_vec3("centroid", spec.centroid);
                ro.read("radius", spec.radius);
                ro.read("count", spec.count);
                ro.finish();
                c.scene.objects.push_back(spec);
            }
        }
        if (const Json* bg = r.child("background")) {
            ObjectReader rb(*bg, "scene.background");
            rb.read("count", c.scene.background.count);
            rb.read_vec3("box_min", c.scene.background.box_min);
            rb.read_vec3("box_max", c.scene.background.box_max);
            rb.read_vec3("keepout_center", c.scene.background.keepout_center);
            rb.read("keepout_radius", c.scene.background.keepout_radius);
            rb.finish();
        }
        r.finish();
    }
    if (const Json* cam = root.child("camera")) c.camera = camera_from_json(*cam);
    if (const Json* pose = root.child("start_pose")) c.start_pose = pose_from_json(*pose);

    if (const Json* noise = root.child("noise")) {
        ObjectReader r(*noise, "noise");
        r.read("map_sigma", c.noise.map_sigma);
        r.read("pixel_sigma", c.noise.pixel_sigma);
        r.read("vision_position_sigma", c.noise.vision_position_sigma);
        r.read("vision_yaw_sigma", c.noise.vision_yaw_sigma);
        r.finish();
    }
    if (const Json* det = root.child("detector")) {
        ObjectReader r(*det, "detector");
        r.read("keep_fraction", c.filter.keep_fraction);
        std::string axis = axis_name(c.filter.depth_axis);
        r.read("depth_axis", axis);
        c.filter.depth_axis = parse_enum<DepthAxis>(
            axis, {{"view_axis", DepthAxis::ViewAxis}, {"world_y", DepthAxis::WorldY}}, r.path("depth_axis"));
        r.read("eps", c.dbscan.eps);
        r.read("min_points", c.dbscan.min_points);
        r.read("min_map_points", c.min_map_points);
        r.finish();
    }
    if (const Json* plan = root.child("planner")) {
        ObjectReader r(*plan, "planner");
        r.read("waypoint_count", c.planner.waypoint_count);
        r.read("arc_spacing", c.planner.arc_spacing);
        r.read("min_radius", c.planner.min_radius);
        std::string dir = direction_name(c.planner.direction);
        r.read("direction", dir);
        c.planner.direction = parse_enum<OrbitDirection>(
            dir, {{"ccw", OrbitDirection::CounterClockwise}, {"cw", OrbitDirection::Clockwise}}, r.path("direction"));
        r.finish();
    }
    if (const Json* ctl = root.child("controller")) {
        ObjectReader r(*ctl, "controller");
        if (const Json* g = r.child("gains")) {
            ObjectReader rg(*g, "controller.gains");
            rg.read("kx", c.gains.kx);
            rg.read("ky", c.gains.ky);
            rg.read("kz", c.gains.kz);
            rg.read("kyaw", c.gains.kyaw);
            rg.read("ki", c.gains.ki);
            rg.read("kd", c.gains.kd);
            rg.finish();
        }
        if (const Json* cl = r.child("clamps")) {
            ObjectReader rc(*cl, "controller.clamps");
            rc.read("vx", c.clamps.vx);
            rc.read("vy", c.clamps.vy);
            rc.read("vz", c.clamps.vz);
            rc.read("vyaw", c.clamps.vyaw);
            rc.finish();
        }
        if (const Json* t = r.child("tolerances")) {
            ObjectReader rt(*t, "controller.tolerances");
            rt.read("position", c.tolerances.position);
            rt.read("yaw", c.tolerances.yaw);
            rt.finish();
        }
        r.finish();
    }
    if (const Json* v = root.child("vehicle")) {
        ObjectReader r(*v, "vehicle");
        r.read("velocity_lag", c.vehicle.velocity_lag);
        r.finish();
    }
    if (const Json* e = root.child("estimator")) {
        ObjectReader r(*e, "estimator");
        r.read("q", c.estimator.q);
        r.read("q_yaw", c.estimator.q_yaw);
        r.read("velocity_lag", c.estimator.velocity_lag);
        double initial = c.initial_variance.x;
        r.read("initial_variance", initial);
        c.initial_variance = {initial, initial, initial, initial};
        r.finish();
    }
    if (const Json* v = root.child("vision")) {
        ObjectReader r(*v, "vision");
        r.read("yaw_loss_threshold", c.vision.yaw_loss_threshold);
        r.read("min_tracked_points", c.vision.min_tracked_points);
        r.read("dropouts", c.vision_dropouts);
        r.finish();
    }
    if (const Json* rec = root.child("reconstructor")) {
        ObjectReader r(*rec, "reconstructor");
        std::string mode = mode_name(c.mode);
        r.read("mode", mode);
        c.mode = parse_enum<ReconstructionMode>(
            mode, {{"dense", ReconstructionMode::Dense}, {"sparse", ReconstructionMode::Sparse}}, r.path("mode"));
        r.read("overlap_min", c.overlap_min);
        r.read("oracle_poses", c.oracle_poses);
        r.finish();
    }
    if (const Json* t = root.child("timeouts")) {
        ObjectReader r(*t, "timeouts");
        r.read("mapping", c.timeouts.mapping);
        r.read("detecting", c.timeouts.detecting);
        r.read("orbiting", c.timeouts.orbiting);
        r.finish();
    }
    root.finish();
    return c;
}

MissionConfig config_from_json(const Json& j) {
    try {
        return config_from_json_impl(j);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
    }
}

Json config_to_json(const MissionConfig& c) {
    Json objects = Json::array();
    for (const auto& o : c.scene.objects) {
        objects.push_back({{"centroid", vec3_to_json(o.centroid)}, {"radius", o.radius}, {"count", o.count}});
    }
    const auto& bg = c.scene.background;
    Json dropouts = Json::array();
    for (const auto& [start, end] : c.vision_dropouts) dropouts.push_back({start, end});
    return Json{
        {"seed", c.seed},
        {"dt", c.dt},
        {"scene",
         {{"objects", objects},
          {"background",
           {{"count", bg.count},
            {"box_min", vec3_to_json(bg.box_min)},
            {"box_max", vec3_to_json(bg.box_max)},
            {"keepout_center", vec3_to_json(bg.keepout_center)},
            {"keepout_radius", bg.keepout_radius}}}}},
        {"camera", camera_to_json(c.camera)},
        {"start_pose", pose_to_json(c.start_pose)},
        {"noise",
         {{"map_sigma", c.noise.map_sigma},
          {"pixel_sigma", c.noise.pixel_sigma},
          {"vision_position_sigma", c.noise.vision_position_sigma},
          {"vision_yaw_sigma", c.noise.vision_yaw_sigma}}},
        {"detector",
         {{"keep_fraction", c.filter.keep_fraction},
          {"depth_axis", axis_name(c.filter.depth_axis)},
          {"eps", c.dbscan.eps},
          {"min_points", c.dbscan.min_points},
          {"min_map_points", c.min_map_points}}},
        {"planner",
         {{"waypoint_count", c.planner.waypoint_count},
          {"arc_spacing", c.planner.arc_spacing},
          {"direction", direction_name(c.planner.direction)},
          {"min_radius", c.planner.min_radius}}},
        {"controller",
         {{"gains",
           {{"kx", c.gains.kx},
            {"ky", c.gains.ky},
            {"kz", c.gains.kz},
            {"kyaw", c.gains.kyaw},
            {"ki", c.gains.ki},
            {"kd", c.gains.kd}}},
          {"clamps", {{"vx", c.clamps.vx}, {"vy", c.clamps.vy}, {"vz", c.clamps.vz}, {"vyaw", c.clamps.vyaw}}},
          {"tolerances", {{"position", c.tolerances.position}, {"yaw", c.tolerances.yaw}}}}},
        {"vehicle", {{"velocity_lag", c.vehicle.velocity_lag}}},
        {"estimator",
         {{"q", c.estimator.q},
          {"q_yaw", c.estimator.q_yaw},
          {"velocity_lag", c.estimator.velocity_lag},
          {"initial_variance", c.initial_variance.x}}},
        {"vision",
         {{"yaw_loss_threshold", c.vision.yaw_loss_threshold},
          {"min_tracked_points", c.vision.min_tracked_points},
          {"dropouts", dropouts}}},
        {"reconstructor",
         {{"mode", mode_name(c.mode)}, {"overlap_min", c.overlap_min}, {"oracle_poses", c.oracle_poses}}},
        {"timeouts",
         {{"mapping", c.timeouts.mapping}, {"detecting", c.timeouts.detecting}, {"orbiting", c.timeouts.orbiting}}},
    };
}

MissionConfig load_config(const std::filesystem::path& path) { return config_from_json(read_json_file(path)); }

Json bundle_to_json(const CaptureBundle& bundle) {
    Json frames = Json::array();
    for (const auto& f : bundle.set.frames) {
        Json obs = Json::array();
        for (const auto& o : f.observations) obs.push_back({o.point_id, o.pixel.x, o.pixel.y});
        frames.push_back({{"waypoint_index", f.waypoint_index},
                          {"pose_estimate", pose_to_json(f.pose_estimate)},
                          {"pose_truth", pose_to_json(f.pose_truth)},
                          {"duplicate_of_latest", f.duplicate_of_latest},
                          {"observations", obs}});
    }
    Json j{{"format", "orbitscan-capture-bundle"}, {"version", 1}};
    if (bundle.camera) j["camera"] = camera_to_json(*bundle.camera);
    j["sparse_map_ids"] = bundle.sparse_map_ids;
    j["frames"] = frames;
    return j;
}

static CaptureBundle bundle_from_json_impl(const Json& j) {
    CaptureBundle bundle;
    ObjectReader r(j, "bundle");
    std::string format;
    int version = 0;
    r.read("format", format);
    r.read("version", version);
    if (format != "orbitscan-capture-bundle" || version != 1) {
        throw Error(ErrorCode::ParseError, "not an orbitscan capture bundle (version 1)");
    }
    if (const Json* cam = r.child("camera")) bundle.camera = camera_from_json(*cam);
    r.read("sparse_map_ids", bundle.sparse_map_ids);
    const Json* frames = r.child("frames");
    if (!frames || !frames->is_array()) throw Error(ErrorCode::ParseError, "bundle.frames: expected an array");
    int previous = -1;
    for (const auto& jf : *frames) {
        CaptureFrame f;
        ObjectReader rf(jf, "bundle.frames[]");
        rf.read("waypoint_index", f.waypoint_index);
        if (const Json* p = rf.child("pose_estimate")) f.pose_estimate = pose_from_json(*p);
        if (const Json* p = rf.child("pose_truth")) {
            f.pose_truth = pose_from_json(*p);
        } else {
            f.pose_truth = f.pose_estimate;
        }
        rf.read("duplicate_of_latest", f.duplicate_of_latest);
        if (const Json* obs = rf.child("observations")) {
            for (const auto& o : *obs) {
                if (!o.is_array() || o.size() != 3) {
                    throw Error(ErrorCode::ParseError, "observation must be [point_id, u, v], got " + o.dump());
                }
                f.observations.push_back({o[0].get<int>(), {o[1].get<double>(), o[2].get<double>()}});
            }
        }
        rf.finish();
        if (f.waypoint_index <= previous) {
            throw Error(ErrorCode::ParseError, "bundle frames must have strictly increasing waypoint_index");
        }
        previous = f.waypoint_index;
        bundle.set.frames.push_back(std::move(f));
    }
    r.finish();
    return bundle;
}

CaptureBundle bundle_from_json(const Json& j) {
    try {
        return bundle_from_json_impl(j);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("bundle: ") + e.what());
    }
}

void write_capture_bundle(const CaptureBundle& bundle, const std::filesystem::path& path) {
    write_text_file(path, bundle_to_json(bundle).dump() + "\n");
}

CaptureBundle read_capture_bundle(const std::filesystem::path& path) { return bundle_from_json(read_json_file(path)); }

Json detection_to_json(const std::vector<MapPoint>& filtered, const ClusterResult& result,
                       const std::optional<Vec3>& target) {
    Json labels = Json::array();
    for (std::size_t i = 0; i < filtered.size(); ++i) {
        labels.push_back({{"id", filtered[i].id}, {"label", result.labels[i]}});
    }
    Json clusters = Json::array();
    for (std::size_t c = 0; c < result.clusters.size(); ++c) {
        clusters.push_back({{"index", c},
                            {"centroid", vec3_to_json(result.clusters[c].centroid)},
                            {"size", result.clusters[c].member_ids.size()},
                            {"member_ids", result.clusters[c].member_ids}});
    }
    return Json{{"filtered_points", filtered.size()},
                {"labels", labels},
                {"clusters", clusters},
                {"target", target ? vec3_to_json(*target) : Json(nullptr)}};
}

Json plan_to_json(const OrbitPlan& plan) {
    Json waypoints = Json::array();
    for (const auto& w : plan.waypoints) {
        waypoints.push_back({{"index", w.index}, {"pose", pose_to_json(w.pose)}, {"angle_on_circle", w.angle_on_circle}});
    }
    return Json{{"center", vec3_to_json(plan.center)},
                {"radius", plan.radius},
                {"direction", direction_name(plan.direction)},
                {"waypoints", waypoints}};
}

Json quality_to_json(const QualityReport& q, const ReconstructionStats& stats) {
    return Json{{"object_points", q.object_points},
                {"object_points_reconstructed", q.object_points_reconstructed},
                {"completeness", q.completeness},
                {"scored_points", q.scored_points},
                {"median_error", optional_number(q.median_error)},
                {"rms_error", optional_number(q.rms_error)},
                {"max_error", optional_number(q.max_error)},
                {"skipped", q.skipped},
                {"candidate_ids", stats.candidate_ids},
                {"single_view", stats.single_view},
                {"degenerate", stats.degenerate}};
}

Json report_to_json(const MissionReport& r) {
    Json durations = Json::object();
    for (const auto& [phase, seconds] : r.state_durations) durations[phase] = seconds;
    Json transitions = Json::array();
    for (const auto& t : r.transitions) {
        transitions.push_back({{"time", t.time}, {"from", t.from}, {"event", t.event}, {"to", t.to}});
    }
    Json j{{"final_state", std::string(to_string(r.final_state.phase))},
           {"abort_reason", r.final_state.phase == Phase::Aborted ? Json(r.final_state.reason) : Json(nullptr)},
           {"elapsed_seconds", r.elapsed},
           {"ticks", r.ticks},
           {"state_durations", durations},
           {"detection",
            {{"map_points", r.map_points},
             {"target", r.target ? vec3_to_json(*r.target) : Json(nullptr)},
             {"true_centroid", r.true_centroid ? vec3_to_json(*r.true_centroid) : Json(nullptr)},
             {"error", optional_number(r.detection_error)}}},
           {"orbit",
            {{"radius", r.orbit_radius},
             {"waypoints_planned", r.waypoints_planned},
             {"waypoints_reached", r.waypoints_reached},
             {"max_commanded_yaw_rate", r.max_commanded_yaw_rate},
             {"max_estimate_error", r.max_estimate_error},
             {"vision_lost_ticks", r.vision_lost_ticks}}},
           {"capture", {{"frames", r.captures}, {"duplicates", r.duplicate_captures}}}};
    if (r.quality && r.reconstruction_stats) {
        Json q = quality_to_json(*r.quality, *r.reconstruction_stats);
        q["observable_completeness"] = optional_number(r.observable_completeness);
        j["reconstruction"] = q;
    } else {
        j["reconstruction"] = nullptr;
    }
    j["ply_file"] = r.ply_file.empty() ? Json(nullptr) : Json(r.ply_file);
    j["transitions"] = transitions;
    j["event_log"] = "events.log";
    return j;
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::IoFailure, "failed writing " + path.string());
}

}  // namespace orbitscan
