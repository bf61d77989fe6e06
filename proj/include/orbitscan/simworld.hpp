#pragma once

#include "orbitscan/geometry.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <vector>

namespace orbitscan {

// Single seeded source threaded through every stochastic call. The engine is
// fully specified by the standard, so sequences are reproducible.
using Rng = std::mt19937_64;

struct WorldPoint {
    int id = 0;
    Vec3 position;
    std::optional<int> object_id;  // absent for background points
};

struct ObjectSpec {
    Vec3 centroid{0.0, 3.0, 1.0};
    double radius = 0.5;
    int count = 200;
};

/// Background clutter: uniform in an axis-aligned box, outside every object
/// ball and outside a keep-out sphere around the vehicle's start.
struct BackgroundSpec {
    int count = 300;
    Vec3 box_min{-15.0, -12.0, 0.0};
    Vec3 box_max{15.0, 24.0, 4.0};
    Vec3 keepout_center{0.0, 0.0, 1.0};
    double keepout_radius = 6.0;
};

struct SceneSpec {
    std::vector<ObjectSpec> objects{ObjectSpec{}};
    BackgroundSpec background;
};

struct Scene {
    std::vector<WorldPoint> points;  // ids are 0..n-1, object points first
    std::vector<ObjectSpec> objects;
    int background_count = 0;
    std::uint64_t seed = 0;

    const WorldPoint* find(int id) const;
    std::size_t object_point_count() const;
};

struct MapPoint {
    int id = 0;
    Vec3 position;

    friend bool operator==(const MapPoint&, const MapPoint&) = default;
};

/// One published snapshot of the sparse map.
struct SparseMapFrame {
    std::vector<MapPoint> points;
    Pose drone_pose;
    int frame_index = 0;
};

/// Deterministic for a given (spec, seed). Throws InvalidSpec for negative
/// counts, non-positive radii, or a background box that cannot hold the
/// requested points.
Scene generate_scene(const SceneSpec& spec, std::uint64_t seed);

/// True when the point is in front of the camera and inside the pinhole
/// horizontal and vertical field of view.
bool in_frustum(const Pose& pose, const CameraIntrinsics& cam, Vec3 point);

/// Sparse-map snapshot: every point inside the frustum, position perturbed by
/// isotropic Gaussian noise. Points are reported in ascending id order.
SparseMapFrame observe(const Scene& scene, const Pose& pose, const CameraIntrinsics& cam,
                       double noise_sigma, Rng& rng, int frame_index = 0);

/// Camera image stand-in: distorted pixel observations (with Gaussian pixel
/// noise) of every frustum point whose pixel lands inside the image.
std::vector<Observation> render_view(const Scene& scene, const Pose& pose, const CameraIntrinsics& cam,
                                     double pixel_sigma, Rng& rng);

/// Running estimate of the sparse map across published frames. Each point's
/// position is the mean of all its estimates so far.
class SparseMap {
public:
    void integrate(const SparseMapFrame& frame);

    std::size_t size() const { return sums_.size(); }
    std::vector<MapPoint> points() const;
    SparseMapFrame snapshot(const Pose& drone_pose, int frame_index) const;

private:
    struct Accum {
        Vec3 sum;
        int count = 0;
    };
    std::map<int, Accum> sums_;
};

}  // namespace orbitscan
