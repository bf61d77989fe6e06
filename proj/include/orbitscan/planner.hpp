#pragma once

#include "orbitscan/geometry.hpp"

#include <optional>
#include <vector>

namespace orbitscan {

struct Waypoint {
    int index = 0;
    Pose pose;  // world frame, yaw facing the orbit center
    double angle_on_circle = 0.0;
};

enum class OrbitDirection { CounterClockwise = 1, Clockwise = -1 };

struct OrbitPlan {
    Vec3 center;
    double radius = 0.0;
    std::vector<Waypoint> waypoints;
    OrbitDirection direction = OrbitDirection::CounterClockwise;
};

struct PlannerParams {
    int waypoint_count = 12;
    // When positive, overrides waypoint_count with max(2, round(2 pi r / spacing)).
    double arc_spacing = 0.0;
    OrbitDirection direction = OrbitDirection::CounterClockwise;
    double min_radius = 0.5;
};

int waypoint_count_for_spacing(double radius, double spacing);

/// Circle around `target` at the drone's altitude, starting at the drone's
/// current bearing from the target. Throws DegenerateOrbit when the drone is
/// within min_radius of the target horizontally, InvalidSpec when n < 2.
OrbitPlan plan_orbit(Vec3 target, const Pose& drone_pose, int n,
                     OrbitDirection direction = OrbitDirection::CounterClockwise, double min_radius = 0.5);

OrbitPlan plan_orbit(Vec3 target, const Pose& drone_pose, const PlannerParams& params);

/// Waypoint after `current_index`, or nullopt once the orbit is complete.
std::optional<Waypoint> next_waypoint(const OrbitPlan& plan, int current_index);

}  // namespace orbitscan
