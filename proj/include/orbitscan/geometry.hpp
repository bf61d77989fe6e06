#pragma once

#include <cmath>
#include <numbers>
#include <optional>
#include <span>

namespace orbitscan {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(const Vec2&, const Vec2&) = default;

    double norm() const { return std::hypot(x, y); }
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;
    Vec3& operator+=(Vec3 o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }

    double dot(Vec3 o) const { return x * o.x + y * o.y + z * o.z; }
    double squared_norm() const { return dot(*this); }
    double norm() const { return std::sqrt(squared_norm()); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline double distance(Vec3 a, Vec3 b) { return (a - b).norm(); }

/// Position in the world frame plus heading. Yaw is counterclockwise about +z
/// and lives in (-pi, pi]; yaw 0 looks along world +y.
struct Pose {
    Vec3 position;
    double yaw = 0.0;

    friend bool operator==(const Pose&, const Pose&) = default;
};

/// Pinhole camera with a two-coefficient radial (Brown) lens model.
/// Defaults approximate a 640x360 front camera with a 93 degree horizontal
/// field of view.
struct CameraIntrinsics {
    double fx = 303.7;
    double fy = 303.7;
    double cx = 320.0;
    double cy = 180.0;
    double k1 = -0.2;
    double k2 = 0.05;
    int width = 640;
    int height = 360;

    /// Throws InvalidSpec when focal lengths or the principal point are out of range.
    void validate() const;

    double horizontal_fov() const { return 2.0 * std::atan(0.5 * width / fx); }
    double vertical_fov() const { return 2.0 * std::atan(0.5 * height / fy); }
    bool in_bounds(Vec2 pixel) const {
        return pixel.x >= 0.0 && pixel.y >= 0.0 && pixel.x < width && pixel.y < height;
    }
};

/// A distorted pixel measurement of an identified world point.
struct Observation {
    int point_id = 0;
    Vec2 pixel;

    friend bool operator==(const Observation&, const Observation&) = default;
};

/// Applies R_z(theta) = [[cos, sin], [-sin, cos]] to the column vector v.
/// For a vehicle yawed by +theta this maps a world-frame displacement into
/// body coordinates (x right, y forward).
Vec2 rotate_world_to_body(Vec2 v, double theta);

/// Inverse of rotate_world_to_body.
inline Vec2 rotate_body_to_world(Vec2 v, double theta) { return rotate_world_to_body(v, -theta); }

/// Maps any finite angle into (-pi, pi]. Angles already in range are returned untouched.
double wrap_angle(double a);

/// Unit vector in the xy-plane that a vehicle with the given yaw looks along.
inline Vec2 heading_vector(double yaw) { return {-std::sin(yaw), std::cos(yaw)}; }

/// Yaw whose heading vector points along (dx, dy).
inline double yaw_facing(double dx, double dy) { return std::atan2(-dx, dy); }

// Camera frame: +x right, +y down, +z forward (the body forward axis). The
// camera center coincides with the vehicle position.

/// Point in camera coordinates for a vehicle at `pose`.
Vec3 world_to_camera(const Pose& pose, Vec3 world);

/// Normalized image coordinates (x/z, y/z), or nullopt when the point is not
/// strictly in front of the camera.
std::optional<Vec2> project_normalized(const Pose& pose, Vec3 world);

/// Unit world-frame direction of the ray through normalized coordinates.
Vec3 ray_direction(const Pose& pose, Vec2 normalized);

/// r^2 = x^2 + y^2, s = 1 + k1 r^2 + k2 r^4, pixel = (fx s x + cx, fy s y + cy).
Vec2 distort_pixel(Vec2 normalized, const CameraIntrinsics& cam);

/// Inverts distort_pixel. Throws NonConvergent when no preimage on the
/// monotone branch of the radial model can be found within tolerance.
Vec2 undistort_pixel(Vec2 pixel, const CameraIntrinsics& cam);

/// A posed bearing used for triangulation.
struct RayObservation {
    Pose pose;
    Vec2 normalized;
};

/// Least-squares intersection of k >= 2 viewing rays: the midpoint of the
/// common perpendicular for two views, homogeneous linear (DLT) least squares
/// for more. Throws InsufficientViews for k < 2 and DegenerateGeometry when
/// the camera centers coincide or the rays are close to parallel.
Vec3 triangulate_point(std::span<const RayObservation> views);

/// Thresholds used by triangulate_point.
inline constexpr double kMinConditionRatio = 1e-8;
inline constexpr double kMinCenterSpread = 1e-6;

}  // namespace orbitscan
