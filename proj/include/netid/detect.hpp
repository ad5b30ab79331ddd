#pragma once

#include <cstddef>
#include <vector>

namespace netid {

struct DetectionEvent {
    int i = 0, j = 0;                    // link, filled by the caller
    double detected_time = 0.0;
    double pre_change_weight = 0.0;      // rolling median at detection onset
    double estimated_new_weight = 0.0;   // median after the detector re-settles
    std::size_t index = 0;               // sample index of the onset
};

// Threshold detector on a per-link estimate series. An event fires when the
// deviation from the trailing rolling median exceeds the threshold for at
// least `dwell` consecutive samples; it then stays latched (hysteresis)
// until the deviation drops back under the threshold, which also yields the
// re-settled estimate of the new weight. Samples before `warmup` feed the
// median but can not fire events, which masks the initial adaptation
// transient.
std::vector<DetectionEvent> detect_changes(const std::vector<double>& times,
                                           const std::vector<double>& series,
                                           double threshold, int dwell,
                                           int median_window = 201,
                                           double warmup = 0.0);

}  // namespace netid
