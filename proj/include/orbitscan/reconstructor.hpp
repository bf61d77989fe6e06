#pragma once

#include "orbitscan/capture.hpp"
#include "orbitscan/geometry.hpp"
#include "orbitscan/simworld.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace orbitscan {

struct OverlapEdge {
    int i = 0;  // frame positions in the capture set, i < j
    int j = 0;
    int shared = 0;

    friend bool operator==(const OverlapEdge&, const OverlapEdge&) = default;
};

struct OverlapGraph {
    std::vector<int> nodes;
    std::vector<OverlapEdge> edges;

    bool connected(int a, int b) const;
    /// Component index per node, numbered by lowest member.
    std::vector<int> components() const;
};

/// Edge between every pair of frames sharing at least overlap_min point ids.
OverlapGraph find_overlaps(const CaptureSet& set, int overlap_min);

enum class ReconstructionMode { Sparse, Dense };

struct ReconstructionOptions {
    ReconstructionMode mode = ReconstructionMode::Dense;
    bool oracle_poses = false;
    int overlap_min = 8;
    std::vector<int> sparse_ids;  // map point ids; only read in sparse mode
};

struct CloudPoint {
    Vec3 position;
    int point_id = 0;
    int view_count = 0;
    double residual = 0.0;  // RMS reprojection error, pixels
};

struct ReconstructionStats {
    int candidate_ids = 0;
    int single_view = 0;  // seen by fewer than two connected frames
    int degenerate = 0;   // triangulation or undistortion failed
};

struct DenseCloud {
    std::vector<CloudPoint> points;  // ascending point_id
    ReconstructionStats stats;
};

/// Triangulates every point id seen by at least two frames of one connected
/// overlap component. Throws InsufficientViews for fewer than two frames and
/// EmptyReconstruction when nothing could be triangulated.
DenseCloud reconstruct(const CaptureSet& set, const CameraIntrinsics& cam, const ReconstructionOptions& options = {});

struct QualityReport {
    std::size_t object_points = 0;
    std::size_t object_points_reconstructed = 0;
    double completeness = 0.0;
    std::size_t scored_points = 0;
    // Absent when nothing could be scored.
    std::optional<double> median_error;
    std::optional<double> rms_error;
    std::optional<double> max_error;
    int skipped = 0;
};

/// Completeness and accuracy over the scene's object points; background points are ignored.
QualityReport score(const DenseCloud& cloud, const Scene& scene);

/// Object point ids observed in at least two captured frames.
std::vector<int> observable_object_ids(const CaptureSet& set, const Scene& scene);

/// Fraction of `ids` present in the cloud (1.0 for an empty id list).
double coverage(const DenseCloud& cloud, std::span<const int> ids);

/// ASCII PLY with float x, y, z per vertex, nine significant digits. A
/// non-empty `ids` (same length as `points`) adds an int `id` property.
void write_ply(std::ostream& out, std::span<const Vec3> points, std::span<const int> ids = {});
void export_ply(const DenseCloud& cloud, const std::filesystem::path& destination);
void export_ply(std::span<const Vec3> points, const std::filesystem::path& destination,
                std::span<const int> ids = {});

/// Reads the vertex element of an ASCII PLY file. Vertex ids come from an
/// integer `id` property when present, otherwise from the vertex index.
std::vector<MapPoint> read_ply(std::istream& in);
std::vector<MapPoint> read_ply(const std::filesystem::path& source);

}  // namespace orbitscan
