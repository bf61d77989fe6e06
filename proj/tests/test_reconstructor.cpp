#include "orbitscan/error.hpp"
#include "orbitscan/planner.hpp"
#include "orbitscan/reconstructor.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace orbitscan;

namespace {

// Frames rendered from every waypoint of an orbit around the default object.
CaptureSet orbit_captures(const Scene& scene, const CameraIntrinsics& cam, double pixel_sigma, std::uint64_t seed,
                          int n = 12) {
    Rng rng(seed);
    const OrbitPlan plan = plan_orbit({0.0, 3.0, 1.0}, {{0.0, 0.3, 1.0}, 0.0}, n);
    CaptureSet set;
    for (const auto& w : plan.waypoints) {
        CaptureFrame f;
        f.waypoint_index = w.index;
        f.observations = render_view(scene, w.pose, cam, pixel_sigma, rng);
        f.pose_truth = w.pose;
        f.pose_estimate = w.pose;
        set.frames.push_back(std::move(f));
    }
    return set;
}

CaptureFrame with_ids(std::initializer_list<int> ids) {
    CaptureFrame f;
    for (int id : ids) f.observations.push_back({id, {1.0, 1.0}});
    return f;
}

std::string ply_text(std::span<const Vec3> pts, std::span<const int> ids = {}) {
    std::ostringstream out;
    write_ply(out, pts, ids);
    return out.str();
}

}  // namespace

TEST(Overlaps, Examples) {
    CaptureSet set;
    set.frames = {with_ids({1, 2, 3}), with_ids({4, 5, 6})};
    EXPECT_TRUE(find_overlaps(set, 1).edges.empty());

    set.frames = {with_ids({1, 2, 3, 4}), with_ids({2, 3, 4, 9})};
    const OverlapGraph g = find_overlaps(set, 3);
    ASSERT_EQ(g.edges.size(), 1u);
    EXPECT_EQ(g.edges[0], (OverlapEdge{0, 1, 3}));
    EXPECT_TRUE(find_overlaps(set, 4).edges.empty());

    set.frames = {with_ids({1, 2}), with_ids({1, 2}), with_ids({1, 2})};
    const OverlapGraph tri = find_overlaps(set, 2);
    EXPECT_EQ(tri.edges.size(), 3u);
    for (const auto& e : tri.edges) EXPECT_LT(e.i, e.j);
    EXPECT_TRUE(tri.connected(0, 2));
    EXPECT_THROW(find_overlaps(set, 0), Error);
}

TEST(Overlaps, Components) {
    CaptureSet set;
    set.frames = {with_ids({1, 2}), with_ids({7, 8}), with_ids({1, 2}), with_ids({7, 8})};
    const OverlapGraph g = find_overlaps(set, 2);
    EXPECT_EQ(g.components(), (std::vector<int>{0, 1, 0, 1}));
    EXPECT_FALSE(g.connected(0, 1));
    EXPECT_TRUE(g.connected(1, 3));
}

TEST(Reconstruct, NoiselessExact) {
    const Scene scene = generate_scene({}, 3);
    const CameraIntrinsics cam;
    const CaptureSet set = orbit_captures(scene, cam, 0.0, 3);
    ReconstructionOptions opt;
    opt.oracle_poses = true;
    const DenseCloud cloud = reconstruct(set, cam, opt);
    ASSERT_FALSE(cloud.points.empty());
    for (const auto& p : cloud.points) {
        EXPECT_LT(distance(p.position, scene.find(p.point_id)->position), 1e-6) << p.point_id;
        EXPECT_GE(p.view_count, 2);
        EXPECT_LT(p.residual, 1e-6);
    }
    for (std::size_t i = 1; i < cloud.points.size(); ++i) {
        EXPECT_LT(cloud.points[i - 1].point_id, cloud.points[i].point_id);
    }
    const QualityReport q = score(cloud, scene);
    EXPECT_LT(*q.rms_error, 1e-6);
    const auto observable = observable_object_ids(set, scene);
    EXPECT_EQ(coverage(cloud, observable), 1.0);
}

TEST(Reconstruct, InsufficientViews) {
    const CameraIntrinsics cam;
    CaptureSet set;
    for (int frames : {0, 1}) {
        try {
            reconstruct(set, cam);
            ADD_FAILURE();
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::InsufficientViews) << frames;
        }
        set.frames.push_back(with_ids({1, 2, 3}));
    }
}

TEST(Reconstruct, SingleViewPointsCounted) {
    const Scene scene = generate_scene({}, 4);
    const CameraIntrinsics cam;
    CaptureSet set = orbit_captures(scene, cam, 0.0, 4, 2);
    set.frames[0].observations.push_back({9999, {320.0, 180.0}});
    ReconstructionOptions opt;
    opt.overlap_min = 1;
    const DenseCloud cloud = reconstruct(set, cam, opt);
    EXPECT_GE(cloud.stats.single_view, 1);
    for (const auto& p : cloud.points) EXPECT_NE(p.point_id, 9999);
    EXPECT_EQ(cloud.stats.candidate_ids,
              static_cast<int>(cloud.points.size()) + cloud.stats.single_view + cloud.stats.degenerate);
}

TEST(Reconstruct, NoOverlapMeansEmpty) {
    CaptureSet set;
    set.frames = {with_ids({1}), with_ids({2})};
    try {
        reconstruct(set, {});
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyReconstruction);
    }
}

TEST(Reconstruct, SparseModeRestrictsIds) {
    const Scene scene = generate_scene({}, 5);
    const CameraIntrinsics cam;
    const CaptureSet set = orbit_captures(scene, cam, 0.0, 5);
    ReconstructionOptions opt;
    opt.mode = ReconstructionMode::Sparse;
    opt.sparse_ids = {0, 5, 10, 15};
    const DenseCloud cloud = reconstruct(set, cam, opt);
    EXPECT_LE(cloud.points.size(), 4u);
    for (const auto& p : cloud.points) EXPECT_EQ(p.point_id % 5, 0);
}

TEST(Reconstruct, ErrorGrowsWithPixelNoise) {
    const CameraIntrinsics cam;
    ReconstructionOptions opt;
    opt.oracle_poses = true;
    double low = 0.0, high = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Scene scene = generate_scene({}, seed);
        low += *score(reconstruct(orbit_captures(scene, cam, 0.25, seed), cam, opt), scene).median_error;
        high += *score(reconstruct(orbit_captures(scene, cam, 1.0, seed), cam, opt), scene).median_error;
    }
    EXPECT_GE(high, low);
}

TEST(Score, Examples) {
    Scene scene;
    scene.points = {{0, {0.0, 0.0, 0.0}, 0}, {1, {1.0, 0.0, 0.0}, 0}, {2, {5.0, 5.0, 5.0}, std::nullopt}};
    scene.objects = {ObjectSpec{}};
    DenseCloud exact;
    exact.points = {{{0.0, 0.0, 0.0}, 0, 2, 0.0}, {{1.0, 0.0, 0.0}, 1, 2, 0.0}};
    QualityReport q = score(exact, scene);
    EXPECT_EQ(q.completeness, 1.0);
    EXPECT_EQ(*q.rms_error, 0.0);

    DenseCloud half;
    half.points = {exact.points[0]};
    q = score(half, scene);
    EXPECT_EQ(q.completeness, 0.5);
    EXPECT_EQ(*q.rms_error, 0.0);

    q = score(DenseCloud{}, scene);
    EXPECT_EQ(q.completeness, 0.0);
    EXPECT_FALSE(q.median_error.has_value());
    EXPECT_FALSE(q.rms_error.has_value());

    DenseCloud off;
    off.points = {{{0.0, 0.0, 3.0}, 0, 2, 0.0}, {{1.0, 0.0, 4.0}, 1, 2, 0.0}};
    off.stats.degenerate = 2;
    q = score(off, scene);
    EXPECT_DOUBLE_EQ(*q.median_error, 3.5);
    EXPECT_DOUBLE_EQ(*q.rms_error, std::sqrt(12.5));
    EXPECT_EQ(*q.max_error, 4.0);
    EXPECT_EQ(q.skipped, 2);
}

TEST(Ply, EmptyCloudHeader) {
    const std::string text = ply_text({});
    EXPECT_NE(text.find("element vertex 0\n"), std::string::npos);
    std::istringstream in(text);
    EXPECT_TRUE(read_ply(in).empty());
}

TEST(Ply, HundredPointsRoundTrip) {
    Rng rng(6);
    std::uniform_real_distribution<double> u(-100.0, 100.0);
    std::vector<Vec3> pts;
    for (int i = 0; i < 100; ++i) pts.push_back({u(rng), u(rng), u(rng)});
    const std::string text = ply_text(pts);
    EXPECT_NE(text.find("element vertex 100\n"), std::string::npos);
    EXPECT_NE(text.find("property float x\n"), std::string::npos);
    std::size_t lines = 0;
    for (char c : text) lines += c == '\n';
    EXPECT_EQ(lines, 7u + 100u);

    std::istringstream in(text);
    const auto back = read_ply(in);
    ASSERT_EQ(back.size(), 100u);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(back[i].id, i);
        EXPECT_EQ(static_cast<float>(back[i].position.x), static_cast<float>(pts[i].x));
        EXPECT_EQ(static_cast<float>(back[i].position.y), static_cast<float>(pts[i].y));
        EXPECT_EQ(static_cast<float>(back[i].position.z), static_cast<float>(pts[i].z));
    }
    EXPECT_EQ(ply_text(pts), text);
}

TEST(Ply, IdsRoundTrip) {
    const std::vector<Vec3> pts{{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}};
    const std::vector<int> ids{42, 7};
    std::istringstream in(ply_text(pts, ids));
    const auto back = read_ply(in);
    EXPECT_EQ(back[0].id, 42);
    EXPECT_EQ(back[1].id, 7);
    const std::vector<int> wrong{1};
    std::ostringstream out;
    EXPECT_THROW(write_ply(out, pts, wrong), Error);
}

TEST(Ply, RejectsMalformed) {
    for (const char* bad : {"", "plx\n", "ply\nformat binary_little_endian 1.0\nelement vertex 0\nend_header\n",
                            "ply\nformat ascii 1.0\nelement vertex 2\nproperty float x\nproperty float y\n"
                            "property float z\nend_header\n1 2 3\n"}) {
        std::istringstream in(bad);
        try {
            read_ply(in);
            ADD_FAILURE() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), ErrorCode::ParseError);
        }
    }
}

TEST(Ply, ExportFailsOnBadPath) {
    const std::vector<Vec3> pts{{0.0, 0.0, 0.0}};
    try {
        export_ply(std::span<const Vec3>(pts), "/nonexistent-dir/x.ply");
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::IoFailure);
    }
}
