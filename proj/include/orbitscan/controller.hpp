#pragma once

#include "orbitscan/geometry.hpp"
#include "orbitscan/planner.hpp"

namespace orbitscan {

/// Proportional gains per axis. The integral and derivative coefficients are
/// carried for completeness and must stay zero.
struct Gains {
    double kx = 0.5;
    double ky = 0.5;
    double kz = 0.6;
    double kyaw = 0.4;
    double ki = 0.0;
    double kd = 0.0;

    void validate() const;
};

/// Body-frame velocity command: vx right, vy forward, vz up, vyaw counterclockwise.
struct ControlCommand {
    double vx = 0.0;
    double vy = 0.0;
    double vz = 0.0;
    double vyaw = 0.0;

    friend bool operator==(const ControlCommand&, const ControlCommand&) = default;
};

/// Symmetric per-axis command limits; the yaw bound keeps rotation slow.
struct Clamps {
    double vx = 1.0;
    double vy = 1.0;
    double vz = 0.7;
    double vyaw = 0.3;
};

struct Tolerances {
    double position = 0.25;  // m
    double yaw = 0.1;        // rad
};

ControlCommand clamp(const ControlCommand& cmd, const Clamps& bounds);

/// World-frame pose error, horizontal part rotated into the body frame by the
/// estimated yaw, times the per-axis gains, then clamped.
ControlCommand control_step(const Waypoint& waypoint, const Pose& estimate, const Gains& gains,
                            const Clamps& bounds);

/// Strictly inside both the position and yaw tolerance.
bool waypoint_reached(const Waypoint& waypoint, const Pose& estimate, const Tolerances& tol);

}  // namespace orbitscan
