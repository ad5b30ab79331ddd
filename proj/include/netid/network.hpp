#pragma once

#include "netid/rng.hpp"
#include "netid/types.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace netid {

/// Step change of one adjacency entry at a point in time.
struct WeightEvent {
    double time = 0.0;
    int i = 0, j = 0;
    double value = 0.0;
};

/// Continuous replacement of one adjacency entry, weight = fn(t).
/// desc is a serializable description ("cos2:amplitude:period", ...);
/// empty for ad-hoc functions built in code.
struct SmoothOverride {
    int i = 0, j = 0;
    std::function<double(double)> fn;
    std::string desc;
};

// Time-varying adjacency: a base matrix, ordered step events, and at most
// one smooth override per entry. Evaluation is right-continuous at event
// times: eval(t0) already reflects a step scheduled at t0.
struct WeightSchedule {
    Mat base;
    std::vector<WeightEvent> events;
    std::vector<SmoothOverride> overrides;

    void validate(int n) const;

    /// Base with every event at time <= t applied (no smooth overrides).
    Mat stepped(double t) const;

    /// Full adjacency at time t (steps plus smooth overrides).
    Mat eval(double t) const;

    /// Apply smooth overrides at time t onto a pre-stepped matrix.
    void apply_overrides(double t, Mat& a) const;

    /// Event times strictly inside (t0, t1), ascending, deduplicated.
    std::vector<double> event_times_in(double t0, double t1) const;

    bool has_events() const { return !events.empty(); }
    bool is_static() const { return events.empty() && overrides.empty(); }
};

struct DisturbanceModel {
    enum class Kind { None, TruncatedGauss, Uniform, Table };

    Kind kind = Kind::None;
    double sigma = 1.0;   // truncated-gauss
    double bound = 3.0;   // truncated-gauss clip, defaults to 3 sigma
    double lo = -1.0;     // uniform
    double hi = 1.0;
    std::vector<Vec> table;   // one entry per hold interval, cycled
    double hold_period = 0.0; // 0 = one draw per integration step

    /// Declared sup-norm bound d_max; 0 for kind None.
    double sup_bound() const;
};

/// The plant: weighted adjacency (optionally scheduled), boolean input
/// matrix, and the input disturbance process.
struct NetworkSystem {
    int n = 0;
    Mat a;
    Mat b;
    DisturbanceModel disturbance;
    std::optional<WeightSchedule> schedule;

    int inputs() const { return static_cast<int>(b.cols()); }
    Mat adjacency_at(double t) const;
    void validate() const;
};

enum class GraphKind { Undirected, Directed };

/// Random network with off-diagonal weights iid U(0,1) and zero diagonal.
/// Undirected graphs draw the upper triangle (row-major) and mirror it;
/// directed graphs draw all off-diagonal entries row-major. B defaults to I.
NetworkSystem gen_random_network(int n, RngStream& rng,
                                 GraphKind kind = GraphKind::Undirected);

/// Graph Laplacian L = D - A, D = diag(row sums). Requires a symmetric
/// matrix with nonnegative off-diagonal entries.
Mat laplacian(const Mat& adjacency);

/// True iff the weighted undirected graph (positive edges) is connected.
bool is_connected(const Mat& adjacency);

/// Piecewise-constant realization of a disturbance, one value per hold
/// interval of width h starting at t=0.
struct SampledSignal {
    double hold = 0.0;
    std::vector<Vec> values;
    double realized_bound = 0.0;  // realized sup-norm max_t |d(t)|_inf

    const Vec& at_index(std::size_t k) const {
        return values[k < values.size() ? k : values.size() - 1];
    }
};

/// Draw a sample-and-hold realization over [0, horizon] with the given
/// number of channels. Truncated-gauss draws are clipped to +-bound, which
/// keeps the realized signal inside the declared sup-norm bound exactly.
SampledSignal sample_disturbance(const DisturbanceModel& model, RngStream& rng,
                                 double horizon, int channels, double dt);

}  // namespace netid
