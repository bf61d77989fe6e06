#include "orbitscan/planner.hpp"

#include "orbitscan/error.hpp"

#include <algorithm>
#include <string>

namespace orbitscan {

int waypoint_count_for_spacing(double radius, double spacing) {
    if (!(spacing > 0.0)) throw Error(ErrorCode::InvalidSpec, "waypoint spacing must be positive");
    const double n = std::round(2.0 * std::numbers::pi * radius / spacing);
    return std::max(2, static_cast<int>(n));
}

OrbitPlan plan_orbit(Vec3 target, const Pose& drone_pose, int n, OrbitDirection direction, double min_radius) {
    if (n < 2) throw Error(ErrorCode::InvalidSpec, "an orbit needs at least two waypoints, got " + std::to_string(n));
    const double dx = drone_pose.position.x - target.x;
    const double dy = drone_pose.position.y - target.y;
    const double radius = std::hypot(dx, dy);
    if (!(radius >= min_radius)) {
        throw Error(ErrorCode::DegenerateOrbit,
                    "horizontal distance to target " + std::to_string(radius) + " m is below " +
                        std::to_string(min_radius) + " m");
    }

    OrbitPlan plan;
    plan.center = target;
    plan.radius = radius;
    plan.direction = direction;
    plan.waypoints.reserve(static_cast<std::size_t>(n));

    const double start = std::atan2(dy, dx);
    const double step = static_cast<int>(direction) * 2.0 * std::numbers::pi / n;
    const double altitude = drone_pose.position.z;
    for (int i = 0; i < n; ++i) {
        const double angle = start + step * i;
        const Vec3 position{target.x + radius * std::cos(angle), target.y + radius * std::sin(angle), altitude};
        const double yaw = wrap_angle(yaw_facing(target.x - position.x, target.y - position.y));
        plan.waypoints.push_back({i, {position, yaw}, wrap_angle(angle)});
    }
    return plan;
}

OrbitPlan plan_orbit(Vec3 target, const Pose& drone_pose, const PlannerParams& params) {
    int n = params.waypoint_count;
    if (params.arc_spacing > 0.0) {
        const double radius = std::hypot(drone_pose.position.x - target.x, drone_pose.position.y - target.y);
        n = waypoint_count_for_spacing(radius, params.arc_spacing);
    }
    return plan_orbit(target, drone_pose, n, params.direction, params.min_radius);
}

std::optional<Waypoint> next_waypoint(const OrbitPlan& plan, int current_index) {
    const auto next = static_cast<std::size_t>(current_index) + 1;
    if (current_index < 0 || next >= plan.waypoints.size()) return std::nullopt;
    return plan.waypoints[next];
}

}  // namespace orbitscan
