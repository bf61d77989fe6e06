#include "orbitscan/capture.hpp"

#include "orbitscan/error.hpp"

#include <algorithm>
#include <string>

namespace orbitscan {

FrameBuffer on_frame(FrameBuffer buffer, CaptureFrame frame) {
    buffer.latest_ = std::move(frame);
    buffer.fresh_ = true;
    return buffer;
}

CaptureSet on_waypoint_reached(FrameBuffer& buffer, CaptureSet set, int waypoint_index) {
    if (!buffer.latest_) throw Error(ErrorCode::NoFrameAvailable, "waypoint reached before any camera frame");
    const auto pos = std::lower_bound(set.frames.begin(), set.frames.end(), waypoint_index,
                                      [](const CaptureFrame& f, int idx) { return f.waypoint_index < idx; });
    if (pos != set.frames.end() && pos->waypoint_index == waypoint_index) {
        throw Error(ErrorCode::InvalidSpec, "waypoint " + std::to_string(waypoint_index) + " already captured");
    }
    CaptureFrame saved = *buffer.latest_;
    saved.waypoint_index = waypoint_index;
    saved.duplicate_of_latest = !buffer.fresh_;
    buffer.fresh_ = false;
    set.frames.insert(pos, std::move(saved));
    return set;
}

bool ready_for_reconstruction(const CaptureSet& set) { return set.frames.size() >= 2; }

}  // namespace orbitscan
