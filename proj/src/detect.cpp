#include "netid/detect.hpp"

#include "netid/types.hpp"

#include <cmath>
#include <deque>
#include <set>

namespace netid {

namespace {

// Trailing-window running median over a fixed-length buffer.
class RollingMedian {
public:
    explicit RollingMedian(std::size_t window) : window_(window) {}

    void push(double v) {
        buffer_.push_back(v);
        sorted_.insert(v);
        if (buffer_.size() > window_) {
            sorted_.erase(sorted_.find(buffer_.front()));
            buffer_.pop_front();
        }
    }

    double median() const {
        auto it = sorted_.begin();
        std::advance(it, (sorted_.size() - 1) / 2);
        return *it;
    }

    bool empty() const { return buffer_.empty(); }

private:
    std::size_t window_;
    std::deque<double> buffer_;
    std::multiset<double> sorted_;
};

}  // namespace

std::vector<DetectionEvent> detect_changes(const std::vector<double>& times,
                                           const std::vector<double>& series,
                                           double threshold, int dwell,
                                           int median_window, double warmup) {
    require(times.size() == series.size(), "detect_changes: times/series size mismatch");
    require(threshold > 0.0, "detect_changes: threshold must be > 0");
    require(dwell >= 1, "detect_changes: dwell must be >= 1 sample");
    require(median_window >= 1, "detect_changes: median window must be >= 1");

    std::vector<DetectionEvent> events;
    RollingMedian med(static_cast<std::size_t>(median_window));

    int run = 0;
    bool latched = false;
    DetectionEvent pending;

    for (std::size_t k = 0; k < series.size(); ++k) {
        const double prior = med.empty() ? series[k] : med.median();
        med.push(series[k]);
        const double dev = std::abs(series[k] - prior);

        if (latched) {
            if (dev <= threshold) {
                // detector re-settled on the new level
                events.back().estimated_new_weight = med.median();
                latched = false;
                run = 0;
            }
            continue;
        }

        if (dev > threshold && times[k] >= warmup) {
            if (run == 0) {
                pending.detected_time = times[k];
                pending.pre_change_weight = prior;
                pending.index = k;
            }
            ++run;
            if (run >= dwell) {
                pending.estimated_new_weight = series[k];  // refined at re-settle
                events.push_back(pending);
                latched = true;
            }
        } else {
            run = 0;
        }
    }
    return events;
}

}  // namespace netid
