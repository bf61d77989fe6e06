#include "orbitscan/controller.hpp"

#include "orbitscan/error.hpp"

#include <algorithm>

namespace orbitscan {

void Gains::validate() const {
    if (kx < 0.0 || ky < 0.0 || kz < 0.0 || kyaw < 0.0) {
        throw Error(ErrorCode::InvalidSpec, "proportional gains must be non-negative");
    }
    if (ki != 0.0 || kd != 0.0) throw Error(ErrorCode::InvalidSpec, "integral and derivative gains must be zero");
}

ControlCommand clamp(const ControlCommand& cmd, const Clamps& bounds) {
    return {std::clamp(cmd.vx, -bounds.vx, bounds.vx), std::clamp(cmd.vy, -bounds.vy, bounds.vy),
            std::clamp(cmd.vz, -bounds.vz, bounds.vz), std::clamp(cmd.vyaw, -bounds.vyaw, bounds.vyaw)};
}

ControlCommand control_step(const Waypoint& waypoint, const Pose& estimate, const Gains& gains,
                            const Clamps& bounds) {
    const Vec3 error = waypoint.pose.position - estimate.position;
    const double yaw_error = wrap_angle(waypoint.pose.yaw - estimate.yaw);
    const Vec2 body = rotate_world_to_body({error.x, error.y}, estimate.yaw);
    return clamp({gains.kx * body.x, gains.ky * body.y, gains.kz * error.z, gains.kyaw * yaw_error}, bounds);
}

bool waypoint_reached(const Waypoint& waypoint, const Pose& estimate, const Tolerances& tol) {
    const double position_error = distance(waypoint.pose.position, estimate.position);
    const double yaw_error = std::abs(wrap_angle(waypoint.pose.yaw - estimate.yaw));
    return position_error < tol.position && yaw_error < tol.yaw;
}

}  // namespace orbitscan
