#include "orbitscan/simworld.hpp"

#include "orbitscan/error.hpp"

#include <algorithm>
#include <string>

namespace orbitscan {

namespace {

Vec3 sample_in_ball(const ObjectSpec& object, Rng& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (;;) {
        const Vec3 offset{unit(rng), unit(rng), unit(rng)};
        if (offset.squared_norm() <= 1.0) return object.centroid + object.radius * offset;
    }
}

bool inside_any_object(const std::vector<ObjectSpec>& objects, Vec3 p) {
    return std::any_of(objects.begin(), objects.end(),
                       [&](const ObjectSpec& o) { return distance(p, o.centroid) <= o.radius; });
}

}  // namespace

const WorldPoint* Scene::find(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= points.size()) return nullptr;
    return &points[static_cast<std::size_t>(id)];
}

std::size_t Scene::object_point_count() const {
    return static_cast<std::size_t>(
        std::count_if(points.begin(), points.end(), [](const WorldPoint& p) { return p.object_id.has_value(); }));
}

Scene generate_scene(const SceneSpec& spec, std::uint64_t seed) {
    for (const auto& o : spec.objects) {
        if (o.count < 0) throw Error(ErrorCode::InvalidSpec, "object point count is negative");
        if (!(o.radius > 0.0)) throw Error(ErrorCode::InvalidSpec, "object radius must be positive");
        if (!o.centroid.finite()) throw Error(ErrorCode::InvalidSpec, "object centroid not finite");
    }
    const auto& bg = spec.background;
    if (bg.count < 0) throw Error(ErrorCode::InvalidSpec, "background point count is negative");

    Scene scene;
    scene.objects = spec.objects;
    scene.background_count = bg.count;
    scene.seed = seed;

    Rng rng(seed);
    int next_id = 0;
    for (std::size_t i = 0; i < spec.objects.size(); ++i) {
        for (int k = 0; k < spec.objects[i].count; ++k) {
            scene.points.push_back({next_id++, sample_in_ball(spec.objects[i], rng), static_cast<int>(i)});
        }
    }

    if (bg.count == 0) return scene;
    if (!(bg.box_min.x < bg.box_max.x && bg.box_min.y < bg.box_max.y && bg.box_min.z < bg.box_max.z)) {
        throw Error(ErrorCode::InvalidSpec, "background box has no volume");
    }
    std::uniform_real_distribution<double> ux(bg.box_min.x, bg.box_max.x);
    std::uniform_real_distribution<double> uy(bg.box_min.y, bg.box_max.y);
    std::uniform_real_distribution<double> uz(bg.box_min.z, bg.box_max.z);
    const long long budget = 1000LL * bg.count + 10000;
    long long attempts = 0;
    for (int k = 0; k < bg.count; ++k) {
        for (;;) {
            if (++attempts > budget) {
                throw Error(ErrorCode::InvalidSpec,
                            "background box cannot hold " + std::to_string(bg.count) + " points outside the keep-out regions");
            }
            const Vec3 p{ux(rng), uy(rng), uz(rng)};
            if (distance(p, bg.keepout_center) < bg.keepout_radius) continue;
            if (inside_any_object(spec.objects, p)) continue;
            scene.points.push_back({next_id++, p, std::nullopt});
            break;
        }
    }
    return scene;
}

bool in_frustum(const Pose& pose, const CameraIntrinsics& cam, Vec3 point) {
    const auto n = project_normalized(pose, point);
    if (!n) return false;
    return std::abs(n->x) <= std::tan(0.5 * cam.horizontal_fov()) &&
           std::abs(n->y) <= std::tan(0.5 * cam.vertical_fov());
}

SparseMapFrame observe(const Scene& scene, const Pose& pose, const CameraIntrinsics& cam, double noise_sigma,
                       Rng& rng, int frame_index) {
    SparseMapFrame frame;
    frame.drone_pose = pose;
    frame.frame_index = frame_index;
    std::normal_distribution<double> noise(0.0, 1.0);
    for (const auto& p : scene.points) {
        if (!in_frustum(pose, cam, p.position)) continue;
        Vec3 estimate = p.position;
        if (noise_sigma > 0.0) {
            estimate += noise_sigma * Vec3{noise(rng), noise(rng), noise(rng)};
        }
        frame.points.push_back({p.id, estimate});
    }
    return frame;
}

std::vector<Observation> render_view(const Scene& scene, const Pose& pose, const CameraIntrinsics& cam,
                                     double pixel_sigma, Rng& rng) {
    std::vector<Observation> out;
    std::normal_distribution<double> noise(0.0, 1.0);
    for (const auto& p : scene.points) {
        if (!in_frustum(pose, cam, p.position)) continue;
        Vec2 pixel = distort_pixel(*project_normalized(pose, p.position), cam);
        if (pixel_sigma > 0.0) pixel = pixel + pixel_sigma * Vec2{noise(rng), noise(rng)};
        if (cam.in_bounds(pixel)) out.push_back({p.id, pixel});
    }
    return out;
}

void SparseMap::integrate(const SparseMapFrame& frame) {
    for (const auto& p : frame.points) {
        auto& acc = sums_[p.id];
        acc.sum += p.position;
        ++acc.count;
    }
}

std::vector<MapPoint> SparseMap::points() const {
    std::vector<MapPoint> out;
    out.reserve(sums_.size());
    for (const auto& [id, acc] : sums_) out.push_back({id, (1.0 / acc.count) * acc.sum});
    return out;
}

SparseMapFrame SparseMap::snapshot(const Pose& drone_pose, int frame_index) const {
    return {points(), drone_pose, frame_index};
}

}  // namespace orbitscan
