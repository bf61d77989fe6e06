#pragma once

#include "orbitscan/geometry.hpp"

#include <optional>
#include <vector>

namespace orbitscan {

struct CaptureFrame {
    int waypoint_index = -1;
    std::vector<Observation> observations;
    Pose pose_estimate;
    Pose pose_truth;  // only read by oracle-pose reconstruction
    bool duplicate_of_latest = false;

    friend bool operator==(const CaptureFrame&, const CaptureFrame&) = default;
};

struct CaptureSet {
    std::vector<CaptureFrame> frames;  // ordered by waypoint_index
};

/// Holds the newest camera frame and whether it has already been saved.
class FrameBuffer {
public:
    bool empty() const { return !latest_; }
    const std::optional<CaptureFrame>& latest() const { return latest_; }
    bool fresh() const { return fresh_; }

private:
    friend FrameBuffer on_frame(FrameBuffer buffer, CaptureFrame frame);
    friend CaptureSet on_waypoint_reached(FrameBuffer& buffer, CaptureSet set, int waypoint_index);

    std::optional<CaptureFrame> latest_;
    bool fresh_ = false;
};

/// Replaces the buffered frame with `frame`.
FrameBuffer on_frame(FrameBuffer buffer, CaptureFrame frame);

/// Saves the buffered frame under `waypoint_index`. If nothing new arrived
/// since the last save the same frame is saved again and flagged as a
/// duplicate. Throws NoFrameAvailable if no frame was ever buffered.
CaptureSet on_waypoint_reached(FrameBuffer& buffer, CaptureSet set, int waypoint_index);

/// Reconstruction may start once at least two waypoints have been captured.
bool ready_for_reconstruction(const CaptureSet& set);

}  // namespace orbitscan
