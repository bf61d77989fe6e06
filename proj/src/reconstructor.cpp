#include "orbitscan/reconstructor.hpp"

#include "orbitscan/error.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>

namespace orbitscan {

namespace {

std::set<int> ids_of(const CaptureFrame& frame) {
    std::set<int> ids;
    for (const auto& o : frame.observations) ids.insert(o.point_id);
    return ids;
}

double reprojection_rms(Vec3 point, std::span<const std::pair<Pose, Vec2>> views, const CameraIntrinsics& cam,
                        bool& behind) {
    double sum = 0.0;
    for (const auto& [pose, pixel] : views) {
        const auto n = project_normalized(pose, point);
        if (!n) {
            behind = true;
            return 0.0;
        }
        const Vec2 d = distort_pixel(*n, cam) - pixel;
        sum += d.x * d.x + d.y * d.y;
    }
    return std::sqrt(sum / static_cast<double>(views.size()));
}

std::string format_float(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(static_cast<float>(value)));
    return buf;
}

}  // namespace

bool OverlapGraph::connected(int a, int b) const {
    const auto comp = components();
    const auto ia = std::find(nodes.begin(), nodes.end(), a);
    const auto ib = std::find(nodes.begin(), nodes.end(), b);
    if (ia == nodes.end() || ib == nodes.end()) return false;
    return comp[static_cast<std::size_t>(ia - nodes.begin())] == comp[static_cast<std::size_t>(ib - nodes.begin())];
}

std::vector<int> OverlapGraph::components() const {
    // Union-find over node positions.
    std::vector<std::size_t> parent(nodes.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto position = [&](int node) {
        return static_cast<std::size_t>(std::find(nodes.begin(), nodes.end(), node) - nodes.begin());
    };
    for (const auto& e : edges) {
        const std::size_t a = find(position(e.i));
        const std::size_t b = find(position(e.j));
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<int> label(nodes.size(), -1);
    std::map<std::size_t, int> numbering;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const std::size_t root = find(i);
        const auto [it, inserted] = numbering.emplace(root, static_cast<int>(numbering.size()));
        label[i] = it->second;
    }
    return label;
}

OverlapGraph find_overlaps(const CaptureSet& set, int overlap_min) {
    if (overlap_min < 1) throw Error(ErrorCode::InvalidSpec, "overlap_min must be at least 1");
    OverlapGraph graph;
    std::vector<std::set<int>> ids;
    for (std::size_t i = 0; i < set.frames.size(); ++i) {
        graph.nodes.push_back(static_cast<int>(i));
        ids.push_back(ids_of(set.frames[i]));
    }
    for (std::size_t i = 0; i < ids.size(); ++i) {
        for (std::size_t j = i + 1; j < ids.size(); ++j) {
            std::vector<int> common;
            std::set_intersection(ids[i].begin(), ids[i].end(), ids[j].begin(), ids[j].end(),
                                  std::back_inserter(common));
            if (static_cast<int>(common.size()) >= overlap_min) {
                graph.edges.push_back({static_cast<int>(i), static_cast<int>(j), static_cast<int>(common.size())});
            }
        }
    }
    return graph;
}

DenseCloud reconstruct(const CaptureSet& set, const CameraIntrinsics& cam, const ReconstructionOptions& options) {
    if (!ready_for_reconstruction(set)) {
        throw Error(ErrorCode::InsufficientViews,
                    "reconstruction needs at least two captured frames, got " + std::to_string(set.frames.size()));
    }
    cam.validate();

    const OverlapGraph graph = find_overlaps(set, options.overlap_min);
    const std::vector<int> component = graph.components();
    const std::set<int> sparse_ids(options.sparse_ids.begin(), options.sparse_ids.end());

    // point id -> (frame position, pixel)
    std::map<int, std::vector<std::pair<std::size_t, Vec2>>> tracks;
    for (std::size_t f = 0; f < set.frames.size(); ++f) {
        for (const auto& o : set.frames[f].observations) {
            if (options.mode == ReconstructionMode::Sparse && !sparse_ids.contains(o.point_id)) continue;
            tracks[o.point_id].emplace_back(f, o.pixel);
        }
    }

    DenseCloud cloud;
    for (const auto& [id, track] : tracks) {
        ++cloud.stats.candidate_ids;

        // Keep the largest group of frames that share an overlap component.
        std::map<int, int> per_component;
        for (const auto& [f, pixel] : track) ++per_component[component[f]];
        int best_component = -1;
        int best_count = 0;
        for (const auto& [c, count] : per_component) {
            if (count > best_count) {
                best_component = c;
                best_count = count;
            }
        }
        if (best_count < 2) {
            ++cloud.stats.single_view;
            continue;
        }

        std::vector<RayObservation> rays;
        std::vector<std::pair<Pose, Vec2>> views;
        try {
            for (const auto& [f, pixel] : track) {
                if (component[f] != best_component) continue;
                const auto& frame = set.frames[f];
                const Pose& pose = options.oracle_poses ? frame.pose_truth : frame.pose_estimate;
                rays.push_back({pose, undistort_pixel(pixel, cam)});
                views.emplace_back(pose, pixel);
            }
            const Vec3 point = triangulate_point(rays);
            bool behind = false;
            const double residual = reprojection_rms(point, views, cam, behind);
            if (behind || !point.finite()) {
                ++cloud.stats.degenerate;
                continue;
            }
            cloud.points.push_back({point, id, static_cast<int>(rays.size()), residual});
        } catch (const Error& e) {
            if (e.code() != ErrorCode::DegenerateGeometry && e.code() != ErrorCode::NonConvergent) throw;
            ++cloud.stats.degenerate;
        }
    }

    if (cloud.points.empty()) throw Error(ErrorCode::EmptyReconstruction, "no point had two usable views");
    return cloud;
}

QualityReport score(const DenseCloud& cloud, const Scene& scene) {
    QualityReport report;
    report.object_points = scene.object_point_count();
    report.skipped = cloud.stats.single_view + cloud.stats.degenerate;

    std::vector<double> errors;
    for (const auto& p : cloud.points) {
        const WorldPoint* truth = scene.find(p.point_id);
        if (!truth || !truth->object_id) continue;
        errors.push_back(distance(p.position, truth->position));
        ++report.object_points_reconstructed;
    }
    report.completeness = report.object_points == 0 ? 0.0
                                                    : static_cast<double>(report.object_points_reconstructed) /
                                                          static_cast<double>(report.object_points);
    report.scored_points = errors.size();
    if (errors.empty()) return report;

    double sum_sq = 0.0;
    for (double e : errors) sum_sq += e * e;
    report.rms_error = std::sqrt(sum_sq / static_cast<double>(errors.size()));
    std::sort(errors.begin(), errors.end());
    const std::size_t mid = errors.size() / 2;
    report.median_error = errors.size() % 2 == 1 ? errors[mid] : 0.5 * (errors[mid - 1] + errors[mid]);
    report.max_error = errors.back();
    return report;
}

std::vector<int> observable_object_ids(const CaptureSet& set, const Scene& scene) {
    std::map<int, int> seen;
    for (const auto& frame : set.frames) {
        for (int id : ids_of(frame)) ++seen[id];
    }
    std::vector<int> out;
    for (const auto& [id, count] : seen) {
        const WorldPoint* p = scene.find(id);
        if (count >= 2 && p && p->object_id) out.push_back(id);
    }
    return out;
}

double coverage(const DenseCloud& cloud, std::span<const int> ids) {
    if (ids.empty()) return 1.0;
    std::set<int> present;
    for (const auto& p : cloud.points) present.insert(p.point_id);
    const auto hit = std::count_if(ids.begin(), ids.end(), [&](int id) { return present.contains(id); });
    return static_cast<double>(hit) / static_cast<double>(ids.size());
}

void write_ply(std::ostream& out, std::span<const Vec3> points, std::span<const int> ids) {
    const bool with_ids = !ids.empty();
    if (with_ids && ids.size() != points.size()) {
        throw Error(ErrorCode::InvalidSpec, "PLY id list does not match the vertex count");
    }
    out << "ply\n"
        << "format ascii 1.0\n"
        << "element vertex " << points.size() << "\n"
        << "property float x\n"
        << "property float y\n"
        << "property float z\n";
    if (with_ids) out << "property int id\n";
    out << "end_header\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Vec3& p = points[i];
        out << format_float(p.x) << ' ' << format_float(p.y) << ' ' << format_float(p.z);
        if (with_ids) out << ' ' << ids[i];
        out << '\n';
    }
}

void export_ply(std::span<const Vec3> points, const std::filesystem::path& destination, std::span<const int> ids) {
    std::ofstream out(destination, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + destination.string() + " for writing");
    write_ply(out, points, ids);
    out.flush();
    if (!out) throw Error(ErrorCode::IoFailure, "failed writing " + destination.string());
}

void export_ply(const DenseCloud& cloud, const std::filesystem::path& destination) {
    std::vector<Vec3> points;
    points.reserve(cloud.points.size());
    for (const auto& p : cloud.points) points.push_back(p.position);
    export_ply(std::span<const Vec3>(points), destination);
}

std::vector<MapPoint> read_ply(std::istream& in) {
    auto fail = [](const std::string& what) { return Error(ErrorCode::ParseError, "PLY: " + what); };

    std::string line;
    if (!std::getline(in, line) || line != "ply") throw fail("missing magic line");

    struct Element {
        std::string name;
        std::size_t count = 0;
        std::vector<std::string> properties;
    };
    std::vector<Element> elements;
    bool ascii = false;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string keyword;
        ss >> keyword;
        if (keyword == "format") {
            std::string fmt;
            ss >> fmt;
            ascii = fmt == "ascii";
        } else if (keyword == "element") {
            Element e;
            if (!(ss >> e.name >> e.count)) throw fail("bad element line '" + line + "'");
            elements.push_back(std::move(e));
        } else if (keyword == "property") {
            if (elements.empty()) throw fail("property before element");
            std::string type, name;
            ss >> type;
            if (type == "list") throw fail("list properties are not supported");
            if (!(ss >> name)) throw fail("bad property line '" + line + "'");
            elements.back().properties.push_back(name);
        } else if (keyword == "end_header") {
            break;
        } else if (keyword != "comment" && keyword != "obj_info" && !keyword.empty()) {
            throw fail("unknown header keyword '" + keyword + "'");
        }
    }
    if (!ascii) throw fail("only ASCII PLY is supported");

    std::vector<MapPoint> points;
    bool found_vertex = false;
    for (const auto& e : elements) {
        if (e.name != "vertex") {
            for (std::size_t i = 0; i < e.count; ++i) {
                if (!std::getline(in, line)) throw fail("truncated element '" + e.name + "'");
            }
            continue;
        }
        found_vertex = true;
        auto index_of = [&](const std::string& name) -> int {
            const auto it = std::find(e.properties.begin(), e.properties.end(), name);
            return it == e.properties.end() ? -1 : static_cast<int>(it - e.properties.begin());
        };
        const int ix = index_of("x"), iy = index_of("y"), iz = index_of("z"), iid = index_of("id");
        if (ix < 0 || iy < 0 || iz < 0) throw fail("vertex element lacks x, y or z");
        std::vector<double> values(e.properties.size());
        for (std::size_t i = 0; i < e.count; ++i) {
            if (!std::getline(in, line)) throw fail("truncated vertex list");
            std::istringstream ss(line);
            for (auto& v : values) {
                if (!(ss >> v)) throw fail("bad vertex line " + std::to_string(i));
            }
            const int id = iid >= 0 ? static_cast<int>(values[static_cast<std::size_t>(iid)]) : static_cast<int>(i);
            points.push_back({id,
                              {values[static_cast<std::size_t>(ix)], values[static_cast<std::size_t>(iy)],
                               values[static_cast<std::size_t>(iz)]}});
        }
    }
    if (!found_vertex) throw fail("no vertex element");
    return points;
}

std::vector<MapPoint> read_ply(const std::filesystem::path& source) {
    std::ifstream in(source, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + source.string());
    return read_ply(in);
}

}  // namespace orbitscan
