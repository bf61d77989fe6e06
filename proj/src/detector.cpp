#include "orbitscan/detector.hpp"

#include "orbitscan/error.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace orbitscan {

namespace {

struct CellKey {
    std::int64_t x, y, z;
    friend bool operator==(const CellKey&, const CellKey&) = default;
};

struct CellHash {
    std::size_t operator()(const CellKey& k) const noexcept {
        std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ull;
        h ^= static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4Full + (h << 6) + (h >> 2);
        h ^= static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ull + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

// Uniform grid with cell size eps: every eps-neighbor lies in the 27 cells
// around a point's own cell.
class NeighborGrid {
public:
    NeighborGrid(std::span<const MapPoint> points, double eps) : points_(points), eps_(eps) {
        for (std::size_t i = 0; i < points.size(); ++i) cells_[key(points[i].position)].push_back(i);
    }

    std::vector<std::size_t> neighbors(std::size_t i) const {
        std::vector<std::size_t> out;
        const Vec3 p = points_[i].position;
        const CellKey c = key(p);
        const double eps2 = eps_ * eps_;
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                for (std::int64_t dz = -1; dz <= 1; ++dz) {
                    const auto it = cells_.find({c.x + dx, c.y + dy, c.z + dz});
                    if (it == cells_.end()) continue;
                    for (std::size_t j : it->second) {
                        if ((points_[j].position - p).squared_norm() <= eps2) out.push_back(j);
                    }
                }
            }
        }
        return out;
    }

private:
    CellKey key(Vec3 p) const {
        return {static_cast<std::int64_t>(std::floor(p.x / eps_)), static_cast<std::int64_t>(std::floor(p.y / eps_)),
                static_cast<std::int64_t>(std::floor(p.z / eps_))};
    }

    std::span<const MapPoint> points_;
    double eps_;
    std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> cells_;
};

double depth_of(const MapPoint& p, const Pose& drone, DepthAxis axis) {
    const Vec3 d = p.position - drone.position;
    if (axis == DepthAxis::WorldY) return d.y;
    const Vec2 h = heading_vector(drone.yaw);
    return d.x * h.x + d.y * h.y;
}

}  // namespace

void FilterParams::validate() const {
    if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
        throw Error(ErrorCode::InvalidSpec, "keep_fraction must be in (0, 1]");
    }
}

void DbscanParams::validate() const {
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidSpec, "eps must be positive");
    if (min_points < 1) throw Error(ErrorCode::InvalidSpec, "min_points must be at least 1");
}

std::vector<MapPoint> depth_filter(const SparseMapFrame& frame, const FilterParams& params) {
    params.validate();
    std::vector<std::pair<double, MapPoint>> front;
    for (const auto& p : frame.points) {
        const double depth = depth_of(p, frame.drone_pose, params.depth_axis);
        if (depth > 0.0) front.emplace_back(depth, p);
    }
    if (front.empty()) throw Error(ErrorCode::EmptyFrame, "no map points in front of the drone");

    std::sort(front.begin(), front.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second.id < b.second.id;
    });
    const double n = static_cast<double>(front.size());
    // Slack absorbs representation error in products such as 0.1 * 20.
    auto keep = static_cast<std::size_t>(std::ceil(params.keep_fraction * n - 1e-9));
    keep = std::clamp<std::size_t>(keep, 1, front.size());

    std::vector<MapPoint> out;
    out.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) out.push_back(front[i].second);
    return out;
}

ClusterResult dbscan(std::span<const MapPoint> points, const DbscanParams& params) {
    params.validate();
    ClusterResult result;
    const std::size_t n = points.size();
    result.labels.assign(n, kNoise);
    if (n == 0) return result;

    std::vector<std::size_t> by_id(n);
    std::iota(by_id.begin(), by_id.end(), std::size_t{0});
    std::sort(by_id.begin(), by_id.end(), [&](std::size_t a, std::size_t b) {
        return points[a].id != points[b].id ? points[a].id < points[b].id : a < b;
    });
    auto id_less = [&](std::size_t a, std::size_t b) {
        return points[a].id != points[b].id ? points[a].id < points[b].id : a < b;
    };

    const NeighborGrid grid(points, params.eps);
    std::vector<std::vector<std::size_t>> neighbors(n);
    std::vector<bool> core(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        neighbors[i] = grid.neighbors(i);
        core[i] = neighbors[i].size() > static_cast<std::size_t>(params.min_points);
    }

    int next_cluster = 0;
    for (std::size_t seed : by_id) {
        if (!core[seed] || result.labels[seed] != kNoise) continue;
        const int cluster = next_cluster++;
        result.labels[seed] = cluster;
        std::deque<std::size_t> frontier{seed};
        while (!frontier.empty()) {
            const std::size_t i = frontier.front();
            frontier.pop_front();
            for (std::size_t j : neighbors[i]) {
                if (core[j] && result.labels[j] == kNoise) {
                    result.labels[j] = cluster;
                    frontier.push_back(j);
                }
            }
        }
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) continue;
        std::size_t best = n;
        for (std::size_t j : neighbors[i]) {
            if (core[j] && (best == n || id_less(j, best))) best = j;
        }
        if (best != n) result.labels[i] = result.labels[best];
    }

    result.clusters.resize(static_cast<std::size_t>(next_cluster));
    std::vector<int> counts(result.clusters.size(), 0);
    for (std::size_t i : by_id) {
        const int label = result.labels[i];
        if (label == kNoise) continue;
        auto& c = result.clusters[static_cast<std::size_t>(label)];
        c.centroid += points[i].position;
        c.member_ids.push_back(points[i].id);
        ++counts[static_cast<std::size_t>(label)];
    }
    for (std::size_t c = 0; c < result.clusters.size(); ++c) {
        result.clusters[c].centroid = (1.0 / counts[c]) * result.clusters[c].centroid;
    }
    return result;
}

ClusterResult dbscan(std::span<const Vec3> points, const DbscanParams& params) {
    std::vector<MapPoint> tagged;
    tagged.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) tagged.push_back({static_cast<int>(i), points[i]});
    return dbscan(std::span<const MapPoint>(tagged), params);
}

Vec3 select_target(const ClusterResult& result, const Pose& drone_pose) {
    if (result.clusters.empty()) throw Error(ErrorCode::NoTarget, "no clusters in the filtered map");
    std::size_t best = 0;
    double best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < result.clusters.size(); ++i) {
        const double d = distance(result.clusters[i].centroid, drone_pose.position);
        if (d < best_distance) {
            best = i;
            best_distance = d;
        }
    }
    return result.clusters[best].centroid;
}

Detection detect(const SparseMapFrame& frame, const FilterParams& filter, const DbscanParams& dbscan_params) {
    Detection d;
    d.filtered = depth_filter(frame, filter);
    d.clusters = dbscan(std::span<const MapPoint>(d.filtered), dbscan_params);
    d.target = select_target(d.clusters, frame.drone_pose);
    return d;
}

}  // namespace orbitscan
