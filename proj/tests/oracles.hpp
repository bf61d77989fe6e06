#pragma once

// Independent reference implementations used by the unit and acceptance tests.
// They favor obviousness over speed and share no code with the library beyond
// the plain value types.

#include "orbitscan/detector.hpp"
#include "orbitscan/geometry.hpp"
#include "orbitscan/simworld.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <random>
#include <tuple>
#include <vector>

namespace oracle {

using orbitscan::Vec3;

// O(n^2) density clustering: neighborhoods from all pairwise distances,
// clusters by BFS over core points, border points to the lowest-index core neighbor.
inline std::vector<int> dbscan(const std::vector<Vec3>& pts, double eps, int min_points) {
    const std::size_t n = pts.size();
    std::vector<std::vector<std::size_t>> nbr(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double dx = pts[i].x - pts[j].x, dy = pts[i].y - pts[j].y, dz = pts[i].z - pts[j].z;
            if (std::sqrt(dx * dx + dy * dy + dz * dz) <= eps) nbr[i].push_back(j);
        }
    }
    std::vector<bool> core(n);
    for (std::size_t i = 0; i < n; ++i) core[i] = static_cast<int>(nbr[i].size()) > min_points;

    std::vector<int> label(n, -1);
    int next = 0;
    for (std::size_t s = 0; s < n; ++s) {
        if (!core[s] || label[s] != -1) continue;
        std::deque<std::size_t> queue{s};
        label[s] = next;
        while (!queue.empty()) {
            const std::size_t p = queue.front();
            queue.pop_front();
            for (std::size_t q : nbr[p]) {
                if (core[q] && label[q] == -1) {
                    label[q] = next;
                    queue.push_back(q);
                }
            }
        }
        ++next;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (core[i]) continue;
        for (std::size_t q : nbr[i]) {  // ascending index
            if (core[q]) {
                label[i] = label[q];
                break;
            }
        }
    }
    return label;
}

// Equal partitions up to a bijective relabeling; noise (-1) must match noise.
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return false;
    std::map<int, int> ab, ba;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if ((a[i] < 0) != (b[i] < 0)) return false;
        if (a[i] < 0) continue;
        const auto [x, fresh_a] = ab.emplace(a[i], b[i]);
        const auto [y, fresh_b] = ba.emplace(b[i], a[i]);
        if (x->second != b[i] || y->second != a[i]) return false;
    }
    return true;
}

struct Instance {
    std::vector<Vec3> points;
    orbitscan::DbscanParams params;
};

// Gaussian blobs of varying density over uniform clutter, n <= 400.
inline Instance random_instance(std::uint64_t seed) {
    std::mt19937_64 rng(seed * 7919 + 17);
    std::uniform_real_distribution<double> box(-6.0, 6.0), unit(0.0, 1.0);
    Instance inst;
    inst.params.eps = 0.3 + 0.9 * unit(rng);
    inst.params.min_points = 1 + static_cast<int>(rng() % 20);
    const int blobs = static_cast<int>(rng() % 6);
    const int budget = 20 + static_cast<int>(rng() % 381);
    int remaining = budget;
    for (int b = 0; b < blobs && remaining > 0; ++b) {
        const Vec3 c{box(rng), box(rng), box(rng)};
        const double spread = 0.1 + 0.8 * unit(rng);
        std::normal_distribution<double> g(0.0, spread);
        const int count = std::min(remaining, 5 + static_cast<int>(rng() % 80));
        for (int i = 0; i < count; ++i) inst.points.push_back({c.x + g(rng), c.y + g(rng), c.z + g(rng)});
        remaining -= count;
    }
    for (int i = 0; i < remaining; ++i) inst.points.push_back({box(rng), box(rng), box(rng)});
    std::shuffle(inst.points.begin(), inst.points.end(), rng);
    return inst;
}

// Ids of the ceil(f * N_front) nearest in-front points, sorted by (depth, id).
inline std::vector<int> depth_filter(const orbitscan::SparseMapFrame& frame, double keep_fraction, bool world_y) {
    const double fx = -std::sin(frame.drone_pose.yaw), fy = std::cos(frame.drone_pose.yaw);
    std::vector<std::pair<double, int>> front;
    for (const auto& p : frame.points) {
        const double dx = p.position.x - frame.drone_pose.position.x;
        const double dy = p.position.y - frame.drone_pose.position.y;
        const double depth = world_y ? dy : dx * fx + dy * fy;
        if (depth > 0.0) front.emplace_back(depth, p.id);
    }
    std::sort(front.begin(), front.end());
    const auto keep = static_cast<std::size_t>(std::ceil(keep_fraction * static_cast<double>(front.size())));
    std::vector<int> ids;
    for (std::size_t i = 0; i < std::min(keep, front.size()); ++i) ids.push_back(front[i].second);
    return ids;
}

}  // namespace oracle
