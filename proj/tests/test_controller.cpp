#include "orbitscan/controller.hpp"
#include "orbitscan/error.hpp"
#include "orbitscan/vehicle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace orbitscan;

namespace {

Waypoint at(Vec3 p, double yaw) { return {0, {p, yaw}, 0.0}; }

void expect_command(const ControlCommand& c, double vx, double vy, double vz, double vyaw) {
    EXPECT_NEAR(c.vx, vx, 1e-12);
    EXPECT_NEAR(c.vy, vy, 1e-12);
    EXPECT_NEAR(c.vz, vz, 1e-12);
    EXPECT_NEAR(c.vyaw, vyaw, 1e-12);
}

}  // namespace

TEST(ControlStep, ZeroError) {
    const Pose p{{1.0, 2.0, 3.0}, 0.4};
    expect_command(control_step(at(p.position, p.yaw), p, {}, {}), 0, 0, 0, 0);
}

TEST(ControlStep, ElementwiseGain) {
    expect_command(control_step(at({1.0, 0.0, 0.0}, 0.0), {}, {}, {}), 0.5, 0, 0, 0);
}

TEST(ControlStep, QuarterTurnRotatesError) {
    const Pose est{{0.0, 0.0, 0.0}, std::numbers::pi / 2};
    expect_command(control_step(at({1.0, 0.0, 0.0}, est.yaw), est, {}, {}), 0, -0.5, 0, 0);
}

TEST(ControlStep, YawErrorWrappedAndClamped) {
    const Pose est{{0.0, 0.0, 0.0}, 3.0};
    const ControlCommand c = control_step(at({}, -3.0), est, {}, {});
    // Shortest turn is +0.283 rad, not -6 rad.
    EXPECT_NEAR(c.vyaw, 0.4 * wrap_angle(-6.0), 1e-12);
    EXPECT_GT(c.vyaw, 0.0);
    const ControlCommand big = control_step(at({}, 1.5), {}, {}, {});
    EXPECT_EQ(big.vyaw, 0.3);
}

TEST(ControlStep, Equivariant) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-5.0, 5.0), a(-3.1, 3.1);
    for (int i = 0; i < 500; ++i) {
        const Waypoint w = at({u(rng), u(rng), u(rng)}, a(rng));
        const Pose est{{u(rng), u(rng), u(rng)}, a(rng)};
        const double phi = a(rng);
        auto rot = [&](Vec3 p) {
            return Vec3{std::cos(phi) * p.x - std::sin(phi) * p.y, std::sin(phi) * p.x + std::cos(phi) * p.y, p.z};
        };
        const ControlCommand base = control_step(w, est, {}, {});
        const ControlCommand turned = control_step(at(rot(w.pose.position), wrap_angle(w.pose.yaw + phi)),
                                                   {rot(est.position), wrap_angle(est.yaw + phi)}, {}, {});
        EXPECT_NEAR(turned.vx, base.vx, 1e-9);
        EXPECT_NEAR(turned.vy, base.vy, 1e-9);
        EXPECT_NEAR(turned.vz, base.vz, 1e-9);
        EXPECT_NEAR(turned.vyaw, base.vyaw, 1e-9);
    }
}

TEST(ControlStep, MonotoneUntilSaturation) {
    double last = -1.0;
    for (double e = 0.0; e < 4.0; e += 0.1) {
        const double vy = control_step(at({0.0, e, 0.0}, 0.0), {}, {}, {}).vy;
        EXPECT_GE(vy, last);
        EXPECT_LE(vy, 1.0);
        last = vy;
    }
    EXPECT_EQ(last, 1.0);
}

TEST(Clamp, Examples) {
    const ControlCommand in{0.2, -0.3, 0.1, 0.05};
    EXPECT_EQ(clamp(in, {}), in);
    expect_command(clamp({0, 0, 0, 1.0}, {}), 0, 0, 0, 0.3);
    expect_command(clamp({0, 0, 0, -1.0}, {}), 0, 0, 0, -0.3);
    expect_command(clamp({-5, 5, 2, 0}, {}), -1, 1, 0.7, 0);
}

TEST(WaypointReached, Tolerances) {
    const Waypoint w = at({0.0, 0.0, 1.0}, 0.0);
    EXPECT_TRUE(waypoint_reached(w, {{0.24, 0.0, 1.0}, 0.09}, {}));
    EXPECT_FALSE(waypoint_reached(w, {{0.1, 0.0, 1.0}, 0.2}, {}));
    EXPECT_FALSE(waypoint_reached(w, {{0.25, 0.0, 1.0}, 0.0}, {}));
    EXPECT_FALSE(waypoint_reached(w, {{0.0, 0.0, 1.0}, -0.1}, {}));
    EXPECT_TRUE(waypoint_reached(at({}, 3.1), {{}, -3.1}, {}));
}

TEST(Gains, NonProportionalTermsRejected) {
    Gains g;
    EXPECT_NO_THROW(g.validate());
    g.ki = 0.1;
    EXPECT_THROW(g.validate(), Error);
    g = {};
    g.kx = -1.0;
    EXPECT_THROW(g.validate(), Error);
}

TEST(ClosedLoop, ConvergesWithoutOvershoot) {
    // Perfect state feedback on the plant from several 3 m offsets.
    const double dt = 1.0 / 30.0;
    for (double bearing : {0.0, 1.0, 2.5, -2.0}) {
        VehicleState s;
        s.pose = {{3.0 * std::cos(bearing), 3.0 * std::sin(bearing), 1.0}, 0.7};
        const Waypoint w = at({0.0, 0.0, 1.0}, -0.4);
        double worst = 0.0;
        int ticks = 0;
        while (!waypoint_reached(w, s.pose, {}) && ticks < 900) {
            const ControlCommand c = control_step(w, s.pose, {}, {});
            EXPECT_LE(std::abs(c.vyaw), 0.3);
            s = step_dynamics(s, c, dt);
            worst = std::max(worst, distance(s.pose.position, w.pose.position));
            ++ticks;
        }
        EXPECT_LT(ticks * dt, 30.0) << bearing;
        EXPECT_LE(worst, 4.5);
    }
}
