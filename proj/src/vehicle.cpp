#include "orbitscan/vehicle.hpp"

#include <algorithm>

namespace orbitscan {

namespace {

double lag_fraction(double dt, double tau) { return tau > 0.0 ? std::min(1.0, dt / tau) : 1.0; }

Vec3 world_velocity(const ControlCommand& cmd, double yaw) {
    const Vec2 horizontal = rotate_body_to_world({cmd.vx, cmd.vy}, yaw);
    return {horizontal.x, horizontal.y, cmd.vz};
}

struct ScalarFilter {
    double value;
    double variance;
};

ScalarFilter kalman(double value, double variance, double innovation, double r) {
    const double gain = variance / (variance + r);
    return {value + gain * innovation, (1.0 - gain) * variance};
}

}  // namespace

VehicleState step_dynamics(const VehicleState& state, const ControlCommand& cmd, double dt,
                           const VehicleParams& params) {
    const double alpha = lag_fraction(dt, params.velocity_lag);
    VehicleState next = state;
    next.velocity = state.velocity + alpha * (world_velocity(cmd, state.pose.yaw) - state.velocity);
    next.yaw_rate = state.yaw_rate + alpha * (cmd.vyaw - state.yaw_rate);
    next.pose.position = state.pose.position + dt * next.velocity;
    next.pose.yaw = wrap_angle(state.pose.yaw + dt * next.yaw_rate);
    return next;
}

EstimatorState predict(const EstimatorState& est, const ControlCommand& cmd, double dt,
                       const EstimatorParams& params) {
    const double alpha = lag_fraction(dt, params.velocity_lag);
    EstimatorState next = est;
    next.velocity_estimate =
        est.velocity_estimate + alpha * (world_velocity(cmd, est.pose_estimate.yaw) - est.velocity_estimate);
    next.yaw_rate_estimate = est.yaw_rate_estimate + alpha * (cmd.vyaw - est.yaw_rate_estimate);
    next.pose_estimate.position = est.pose_estimate.position + dt * next.velocity_estimate;
    next.pose_estimate.yaw = wrap_angle(est.pose_estimate.yaw + dt * next.yaw_rate_estimate);
    next.variance.x += params.q * dt;
    next.variance.y += params.q * dt;
    next.variance.z += params.q * dt;
    next.variance.yaw += params.q_yaw * dt;
    return next;
}

EstimatorState update(const EstimatorState& est, const Pose& measured, double r_position, double r_yaw) {
    EstimatorState next = est;
    const auto& p = est.pose_estimate.position;
    const auto& m = measured.position;
    const auto x = kalman(p.x, est.variance.x, m.x - p.x, r_position);
    const auto y = kalman(p.y, est.variance.y, m.y - p.y, r_position);
    const auto z = kalman(p.z, est.variance.z, m.z - p.z, r_position);
    const auto yaw = kalman(est.pose_estimate.yaw, est.variance.yaw,
                            wrap_angle(measured.yaw - est.pose_estimate.yaw), r_yaw);
    next.pose_estimate = {{x.value, y.value, z.value}, wrap_angle(yaw.value)};
    next.variance = {x.variance, y.variance, z.variance, yaw.variance};
    next.vision_available = true;
    return next;
}

bool vision_gate(const VehicleState& state, int visible_count, const VisionParams& params) {
    return std::abs(state.yaw_rate) <= params.yaw_loss_threshold && visible_count >= params.min_tracked_points;
}

}  // namespace orbitscan
