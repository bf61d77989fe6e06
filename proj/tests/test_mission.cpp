#include "orbitscan/error.hpp"
#include "orbitscan/mission.hpp"
#include "orbitscan/serialization.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace orbitscan;

namespace {

MissionState orbiting(int i, int n) { return {Phase::Orbiting, i, n, {}}; }

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("orbitscan_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

const MissionResult& default_run() {
    static const MissionResult result = run(MissionConfig{});
    return result;
}

}  // namespace

TEST(Transition, LegalSequence) {
    MissionState s;
    s = transition(s, MissionEvent::start());
    EXPECT_EQ(s.phase, Phase::Mapping);
    s = transition(s, MissionEvent::map_ready());
    EXPECT_EQ(s.phase, Phase::Detecting);
    s = transition(s, MissionEvent::target_found(3));
    EXPECT_EQ(s, orbiting(0, 3));
    s = transition(s, MissionEvent::waypoint_reached());
    EXPECT_EQ(s, orbiting(1, 3));
    s = transition(s, MissionEvent::waypoint_reached());
    s = transition(s, MissionEvent::waypoint_reached());
    EXPECT_EQ(s.phase, Phase::Reconstructing);
    s = transition(s, MissionEvent::reconstruction_done());
    EXPECT_EQ(s.phase, Phase::Done);
}

TEST(Transition, LastWaypointGoesToReconstructing) {
    EXPECT_EQ(transition(orbiting(11, 12), MissionEvent::waypoint_reached()).phase, Phase::Reconstructing);
}

TEST(Transition, TerminalStatesRejectEverything) {
    const MissionState done{Phase::Done, 0, 0, {}};
    const MissionState aborted{Phase::Aborted, 0, 0, "NoTarget"};
    for (const auto& e : {MissionEvent::start(), MissionEvent::map_ready(), MissionEvent::target_found(2),
                          MissionEvent::waypoint_reached(), MissionEvent::reconstruction_done(),
                          MissionEvent::abort("x")}) {
        for (const auto& s : {done, aborted}) {
            try {
                transition(s, e);
                ADD_FAILURE();
            } catch (const Error& err) {
                EXPECT_EQ(err.code(), ErrorCode::IllegalTransition);
            }
        }
    }
}

TEST(Transition, AbortFromAnyLiveState) {
    for (const auto& s : {MissionState{}, MissionState{Phase::Mapping, 0, 0, {}},
                          MissionState{Phase::Detecting, 0, 0, {}}, orbiting(2, 5),
                          MissionState{Phase::Reconstructing, 0, 0, {}}}) {
        const MissionState a = transition(s, MissionEvent::abort("OrbitTimeout"));
        EXPECT_EQ(a.phase, Phase::Aborted);
        EXPECT_EQ(a.reason, "OrbitTimeout");
    }
}

TEST(Transition, OutOfOrderRejected) {
    EXPECT_THROW(transition({}, MissionEvent::map_ready()), Error);
    EXPECT_THROW(transition({Phase::Mapping, 0, 0, {}}, MissionEvent::target_found(4)), Error);
    EXPECT_THROW(transition({Phase::Detecting, 0, 0, {}}, MissionEvent::target_found(0)), Error);
    EXPECT_THROW(transition(orbiting(0, 4), MissionEvent::reconstruction_done()), Error);
}

TEST(Mission, DefaultCompletes) {
    const MissionReport& r = default_run().report;
    EXPECT_EQ(r.final_state.phase, Phase::Done);
    EXPECT_EQ(r.waypoints_planned, 12);
    EXPECT_EQ(r.waypoints_reached, 12);
    EXPECT_EQ(r.captures, 12);
    EXPECT_LE(r.elapsed, 120.0);
    EXPECT_LE(r.max_commanded_yaw_rate, 0.3);
    ASSERT_TRUE(r.quality);
    EXPECT_GT(r.quality->completeness, 0.9);
    EXPECT_LT(*r.quality->median_error, 0.05);
    double total = 0.0;
    for (const auto& [name, seconds] : r.state_durations) total += seconds;
    EXPECT_NEAR(total, r.elapsed, 1e-6);
}

TEST(Mission, StateSequenceIsPrefixOfHappyPath) {
    const std::vector<std::string> order{"Idle", "Mapping", "Detecting", "Orbiting", "Reconstructing", "Done"};
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        MissionConfig cfg;
        cfg.seed = seed;
        const auto r = run(cfg).report;
        std::size_t pos = 0;
        for (const auto& t : r.transitions) {
            std::string from = t.from.substr(0, t.from.find('('));
            std::string to = t.to.substr(0, t.to.find('('));
            EXPECT_EQ(from, order[pos]);
            if (to == "Aborted") break;
            if (to != from) ++pos;
            EXPECT_EQ(to, order[pos]);
        }
    }
}

TEST(Mission, YawRateClampedEveryTick) {
    for (const auto& t : default_run().trace) {
        if (t.phase == Phase::Orbiting) EXPECT_LE(std::abs(t.command.vyaw), 0.3);
    }
}

TEST(Mission, Deterministic) {
    const MissionResult again = run(MissionConfig{});
    EXPECT_EQ(report_to_json(again.report).dump(), report_to_json(default_run().report).dump());
    ASSERT_TRUE(again.cloud);
    std::ostringstream a, b;
    std::vector<Vec3> pa, pb;
    for (const auto& p : again.cloud->points) pa.push_back(p.position);
    for (const auto& p : default_run().cloud->points) pb.push_back(p.position);
    write_ply(a, pa);
    write_ply(b, pb);
    EXPECT_EQ(a.str(), b.str());
}

TEST(Mission, NoObjectsAbortsNoTarget) {
    MissionConfig cfg;
    cfg.scene.objects.clear();
    const auto r = run(cfg).report;
    EXPECT_EQ(r.final_state.phase, Phase::Aborted);
    EXPECT_EQ(r.final_state.reason, "NoTarget");
}

TEST(Mission, ZeroOrbitTimeout) {
    MissionConfig cfg;
    cfg.timeouts.orbiting = 0.0;
    const auto r = run(cfg).report;
    EXPECT_EQ(r.final_state.phase, Phase::Aborted);
    EXPECT_EQ(r.final_state.reason, "OrbitTimeout");
}

TEST(Mission, InvalidConfigAborts) {
    MissionConfig cfg;
    cfg.dt = 0.0;
    const auto r = run(cfg).report;
    EXPECT_EQ(r.final_state.phase, Phase::Aborted);
    EXPECT_EQ(r.final_state.reason, "InvalidSpec");
}

TEST(Mission, DropoutDeadReckons) {
    MissionConfig cfg;
    cfg.vision_dropouts = {{5.0, 10.0}};
    const MissionResult res = run(cfg);
    EXPECT_EQ(res.report.final_state.phase, Phase::Done);
    EXPECT_GE(res.report.vision_lost_ticks, 149);
    EXPECT_LT(res.report.max_estimate_error, 0.5);
}

TEST(EmitReport, FilesWritten) {
    const auto dir = scratch("emit");
    emit_report(default_run().report, dir);
    const Json j = read_json_file(dir / "report.json");
    EXPECT_EQ(j["final_state"], "Done");
    EXPECT_EQ(j["ply_file"], "reconstruction.ply");
    EXPECT_FALSE(slurp(dir / "events.log").empty());

    MissionConfig cfg;
    cfg.scene.objects.clear();
    emit_report(run(cfg).report, dir);
    const Json aborted = read_json_file(dir / "report.json");
    EXPECT_EQ(aborted["final_state"], "Aborted");
    EXPECT_EQ(aborted["abort_reason"], "NoTarget");
    std::filesystem::remove_all(dir);
}

TEST(EmitReport, ByteIdenticalAcrossRuns) {
    const auto a = scratch("det_a"), b = scratch("det_b");
    write_outputs(run(MissionConfig{}), MissionConfig{}, a);
    write_outputs(run(MissionConfig{}), MissionConfig{}, b);
    for (const char* f : {"report.json", "events.log", "reconstruction.ply", "sparse_map.ply", "capture_bundle.json"}) {
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    std::filesystem::remove_all(a);
    std::filesystem::remove_all(b);
}

TEST(EmitReport, UnwritableDestination) {
    try {
        emit_report(default_run().report, "/proc/orbitscan/nope");
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IoFailure);
    }
}
