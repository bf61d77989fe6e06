#pragma once

#include "orbitscan/geometry.hpp"
#include "orbitscan/simworld.hpp"

#include <span>
#include <vector>

namespace orbitscan {

enum class DepthAxis {
    ViewAxis,  // component along the drone's viewing direction
    WorldY,    // raw world y offset from the drone
};

struct FilterParams {
    double keep_fraction = 0.10;
    DepthAxis depth_axis = DepthAxis::ViewAxis;

    void validate() const;
};

struct DbscanParams {
    double eps = 0.99;
    int min_points = 20;

    void validate() const;
};

inline constexpr int kNoise = -1;

struct Cluster {
    Vec3 centroid;
    std::vector<int> member_ids;  // ascending
};

struct ClusterResult {
    std::vector<int> labels;  // aligned with the input points; kNoise or a cluster index
    std::vector<Cluster> clusters;
};

/// Keeps the ceil(keep_fraction * N) closest in-front points, where N counts
/// points with positive depth. Output is ordered by depth, then by id.
/// Throws EmptyFrame when no point lies in front of the drone.
std::vector<MapPoint> depth_filter(const SparseMapFrame& frame, const FilterParams& params);

/// Density-based clustering over 3D points.
///
/// The eps-neighborhood of p is every point q (p included) with
/// |p - q| <= eps. A point is a core point when its neighborhood holds strictly
/// more than min_points members. Clusters are the connected components of core
/// points under the neighborhood relation and are numbered by their lowest core
/// id. A non-core point that has core neighbors joins the cluster of its
/// lowest-id core neighbor; everything else is noise. The result therefore
/// depends only on ids and positions, never on input order.
ClusterResult dbscan(std::span<const MapPoint> points, const DbscanParams& params);

/// Convenience overload: ids are the input indices.
ClusterResult dbscan(std::span<const Vec3> points, const DbscanParams& params);

/// Centroid of the cluster nearest to the drone; ties go to the lower index.
/// Throws NoTarget when there are no clusters.
Vec3 select_target(const ClusterResult& result, const Pose& drone_pose);

/// depth_filter, dbscan and select_target in sequence.
struct Detection {
    std::vector<MapPoint> filtered;
    ClusterResult clusters;
    Vec3 target;
};
Detection detect(const SparseMapFrame& frame, const FilterParams& filter, const DbscanParams& dbscan_params);

}  // namespace orbitscan
