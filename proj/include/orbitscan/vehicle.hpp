#pragma once

#include "orbitscan/controller.hpp"
#include "orbitscan/geometry.hpp"

namespace orbitscan {

struct VehicleParams {
    double velocity_lag = 0.5;  // tau, seconds
};

/// Ground-truth state of the simulated quadrotor.
struct VehicleState {
    Pose pose;
    Vec3 velocity;  // world frame, m/s
    double yaw_rate = 0.0;

    friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

/// First-order velocity lag toward the commanded body velocity rotated into
/// the world by the current yaw; position and yaw integrate the lagged rates.
VehicleState step_dynamics(const VehicleState& state, const ControlCommand& cmd, double dt,
                           const VehicleParams& params = {});

struct AxisVariance {
    double x = 1e-4;
    double y = 1e-4;
    double z = 1e-4;
    double yaw = 1e-4;

    friend bool operator==(const AxisVariance&, const AxisVariance&) = default;
};

struct EstimatorParams {
    double q = 0.01;        // position process noise rate, m^2/s
    double q_yaw = 0.01;    // yaw process noise rate, rad^2/s
    // Lag used to turn commands into predicted velocity. Matching the plant's
    // tau removes systematic dead-reckoning drift; 0 integrates raw commands.
    double velocity_lag = 0.5;
};

/// Four independent scalar Kalman filters (x, y, z, yaw) driven by commanded
/// motion between vision fixes.
struct EstimatorState {
    Pose pose_estimate;
    AxisVariance variance;
    Vec3 velocity_estimate;  // world frame
    double yaw_rate_estimate = 0.0;
    bool vision_available = true;

    friend bool operator==(const EstimatorState&, const EstimatorState&) = default;
};

/// Dead-reckoning step: advances the estimate by the commanded velocity and
/// grows every axis variance by q * dt.
EstimatorState predict(const EstimatorState& est, const ControlCommand& cmd, double dt,
                       const EstimatorParams& params = {});

/// Scalar Kalman update per axis with gain p / (p + r). Yaw innovation is wrapped.
EstimatorState update(const EstimatorState& est, const Pose& measured, double r_position, double r_yaw);
inline EstimatorState update(const EstimatorState& est, const Pose& measured, double r) {
    return update(est, measured, r, r);
}

struct VisionParams {
    double yaw_loss_threshold = 0.5;  // rad/s
    int min_tracked_points = 15;
};

/// Vision tracking survives only slow yaw with enough tracked features.
bool vision_gate(const VehicleState& state, int visible_count, const VisionParams& params = {});

}  // namespace orbitscan
