#include "orbitscan/geometry.hpp"

#include "orbitscan/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <string>

namespace orbitscan {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr int kFixedPointIterations = 20;
constexpr int kNewtonIterations = 100;
constexpr double kUndistortTolerance = 1e-9;

Eigen::Vector3d to_eigen(Vec3 v) { return {v.x, v.y, v.z}; }

double radial_scale(double r2, const CameraIntrinsics& cam) {
    return 1.0 + cam.k1 * r2 + cam.k2 * r2 * r2;
}

// f(r) = r * s(r) and its derivative.
double radial_forward(double r, const CameraIntrinsics& cam) { return r * radial_scale(r * r, cam); }
double radial_slope(double r, const CameraIntrinsics& cam) {
    const double r2 = r * r;
    return 1.0 + 3.0 * cam.k1 * r2 + 5.0 * cam.k2 * r2 * r2;
}

// Smallest positive radius where the radial model stops being monotone, or
// +inf when it is monotone everywhere.
double monotone_limit(const CameraIntrinsics& cam) {
    // 5 k2 u^2 + 3 k1 u + 1 = 0 with u = r^2.
    const double a = 5.0 * cam.k2;
    const double b = 3.0 * cam.k1;
    double u = std::numeric_limits<double>::infinity();
    if (a == 0.0) {
        if (b < 0.0) u = -1.0 / b;
    } else {
        const double disc = b * b - 4.0 * a;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            for (double root : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)}) {
                if (root > 0.0) u = std::min(u, root);
            }
        }
    }
    return std::sqrt(u);
}

// Safeguarded Newton solve of f(r) = target on the monotone branch.
std::optional<double> solve_radius(double target, const CameraIntrinsics& cam) {
    double hi = monotone_limit(cam);
    if (std::isfinite(hi)) {
        if (radial_forward(hi, cam) < target) return std::nullopt;
    } else {
        hi = std::max(target, 1.0);
        while (radial_forward(hi, cam) < target) {
            hi *= 2.0;
            if (!std::isfinite(hi)) return std::nullopt;
        }
    }
    double lo = 0.0;
    double r = std::min(target, hi);
    for (int i = 0; i < kNewtonIterations; ++i) {
        const double residual = radial_forward(r, cam) - target;
        if (std::abs(residual) < kUndistortTolerance) return r;
        if (residual < 0.0) {
            lo = r;
        } else {
            hi = r;
        }
        const double slope = radial_slope(r, cam);
        double next = slope > 0.0 ? r - residual / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        r = next;
    }
    return std::nullopt;
}

}  // namespace

void CameraIntrinsics::validate() const {
    if (!(fx > 0.0 && fy > 0.0)) throw Error(ErrorCode::InvalidSpec, "focal lengths must be positive");
    if (width <= 0 || height <= 0) throw Error(ErrorCode::InvalidSpec, "image size must be positive");
    if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height)) {
        throw Error(ErrorCode::InvalidSpec, "principal point outside the image");
    }
    if (!std::isfinite(k1) || !std::isfinite(k2)) throw Error(ErrorCode::InvalidSpec, "distortion not finite");
}

Vec2 rotate_world_to_body(Vec2 v, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {c * v.x + s * v.y, -s * v.x + c * v.y};
}

double wrap_angle(double a) {
    if (a > -kPi && a <= kPi) return a;
    double r = std::fmod(a + kPi, kTwoPi);
    if (r <= 0.0) r += kTwoPi;
    return r - kPi;
}

Vec3 world_to_camera(const Pose& pose, Vec3 world) {
    const Vec3 d = world - pose.position;
    const Vec2 body = rotate_world_to_body({d.x, d.y}, pose.yaw);
    return {body.x, -d.z, body.y};
}

std::optional<Vec2> project_normalized(const Pose& pose, Vec3 world) {
    const Vec3 c = world_to_camera(pose, world);
    if (!(c.z > 0.0)) return std::nullopt;
    return Vec2{c.x / c.z, c.y / c.z};
}

Vec3 ray_direction(const Pose& pose, Vec2 normalized) {
    const Vec2 horizontal = rotate_body_to_world({normalized.x, 1.0}, pose.yaw);
    const Vec3 d{horizontal.x, horizontal.y, -normalized.y};
    return (1.0 / d.norm()) * d;
}

Vec2 distort_pixel(Vec2 normalized, const CameraIntrinsics& cam) {
    const double r2 = normalized.x * normalized.x + normalized.y * normalized.y;
    const double s = radial_scale(r2, cam);
    return {cam.fx * s * normalized.x + cam.cx, cam.fy * s * normalized.y + cam.cy};
}

Vec2 undistort_pixel(Vec2 pixel, const CameraIntrinsics& cam) {
    const Vec2 p{(pixel.x - cam.cx) / cam.fx, (pixel.y - cam.cy) / cam.fy};
    const double target = p.norm();
    if (target == 0.0) return {0.0, 0.0};

    auto residual = [&](Vec2 x) {
        const double s = radial_scale(x.x * x.x + x.y * x.y, cam);
        return (s * x - p).norm();
    };

    Vec2 x = p;
    for (int i = 0; i < kFixedPointIterations; ++i) {
        if (residual(x) < kUndistortTolerance) return x;
        const double s = radial_scale(x.x * x.x + x.y * x.y, cam);
        if (!(s > 0.0) || !std::isfinite(s)) break;
        x = (1.0 / s) * p;
    }
    if (residual(x) < kUndistortTolerance) return x;

    // Fixed-point iteration stalls where the model approaches its fold; the
    // radial equation along the known direction is solved directly instead.
    const auto r = solve_radius(target, cam);
    if (!r) {
        throw Error(ErrorCode::NonConvergent,
                    "pixel (" + std::to_string(pixel.x) + ", " + std::to_string(pixel.y) +
                        ") outside the invertible range of the distortion model");
    }
    return (*r / target) * p;
}

Vec3 triangulate_point(std::span<const RayObservation> views) {
    if (views.size() < 2) {
        throw Error(ErrorCode::InsufficientViews, "triangulation needs at least two views, got " +
                                                      std::to_string(views.size()));
    }

    Eigen::Vector3d mean = Eigen::Vector3d::Zero();
    for (const auto& v : views) mean += to_eigen(v.pose.position);
    mean /= static_cast<double>(views.size());
    double spread = 0.0;
    for (const auto& v : views) spread = std::max(spread, (to_eigen(v.pose.position) - mean).norm());
    if (spread < kMinCenterSpread) {
        throw Error(ErrorCode::DegenerateGeometry, "camera centers coincide");
    }

    // Sum of projectors orthogonal to each ray; singular when all rays are parallel.
    Eigen::Matrix3d normal = Eigen::Matrix3d::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    for (const auto& v : views) {
        const Eigen::Vector3d d = to_eigen(ray_direction(v.pose, v.normalized));
        const Eigen::Matrix3d proj = Eigen::Matrix3d::Identity() - d * d.transpose();
        normal += proj;
        rhs += proj * (to_eigen(v.pose.position) - mean);
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(normal);
    const Eigen::Vector3d ev = eig.eigenvalues();
    if (ev(0) <= kMinConditionRatio * ev(2)) {
        throw Error(ErrorCode::DegenerateGeometry, "viewing rays are nearly parallel");
    }

    if (views.size() == 2) {
        const Eigen::Vector3d x = eig.eigenvectors() * ev.cwiseInverse().asDiagonal() *
                                  eig.eigenvectors().transpose() * rhs;
        return {x(0) + mean(0), x(1) + mean(1), x(2) + mean(2)};
    }

    // Homogeneous DLT over all views, in coordinates centered on the cameras.
    Eigen::MatrixXd design(2 * views.size(), 4);
    for (std::size_t i = 0; i < views.size(); ++i) {
        const auto& v = views[i];
        const double c = std::cos(v.pose.yaw);
        const double s = std::sin(v.pose.yaw);
        Eigen::Matrix3d rot;
        rot << c, s, 0.0,   //
            0.0, 0.0, -1.0,  //
            -s, c, 0.0;
        Eigen::Matrix<double, 3, 4> proj;
        proj.leftCols<3>() = rot;
        proj.col(3) = -rot * (to_eigen(v.pose.position) - mean);
        Eigen::RowVector4d row_x = v.normalized.x * proj.row(2) - proj.row(0);
        Eigen::RowVector4d row_y = v.normalized.y * proj.row(2) - proj.row(1);
        design.row(2 * i) = row_x / row_x.norm();
        design.row(2 * i + 1) = row_y / row_y.norm();
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeFullV);
    const Eigen::Vector4d h = svd.matrixV().col(3);
    if (std::abs(h(3)) < std::numeric_limits<double>::epsilon() * h.head<3>().norm()) {
        throw Error(ErrorCode::DegenerateGeometry, "triangulated point at infinity");
    }
    const Eigen::Vector3d x = h.head<3>() / h(3);
    return {x(0) + mean(0), x(1) + mean(1), x(2) + mean(2)};
}

}  // namespace orbitscan
