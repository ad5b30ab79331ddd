#include "netid/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

namespace netid {

void WeightSchedule::validate(int n) const {
    require(base.rows() == n && base.cols() == n, "schedule: base must be n x n");
    require_finite(base, "schedule: base");
    for (std::size_t k = 0; k < events.size(); ++k) {
        const auto& ev = events[k];
        require(ev.i >= 0 && ev.i < n && ev.j >= 0 && ev.j < n,
                "schedule: event index out of range");
        require(std::isfinite(ev.value), "schedule: event value not finite");
        if (k > 0)
            require(events[k - 1].time <= ev.time,
                    "schedule: event times must be non-decreasing");
    }
    std::set<std::pair<int, int>> seen;
    for (const auto& ov : overrides) {
        require(ov.i >= 0 && ov.i < n && ov.j >= 0 && ov.j < n,
                "schedule: override index out of range");
        require(ov.fn != nullptr, "schedule: override missing function");
        require(seen.insert({ov.i, ov.j}).second,
                "schedule: at most one smooth override per entry");
    }
}

Mat WeightSchedule::stepped(double t) const {
    Mat a = base;
    for (const auto& ev : events) {
        if (ev.time > t) break;
        a(ev.i, ev.j) = ev.value;
    }
    return a;
}

void WeightSchedule::apply_overrides(double t, Mat& a) const {
    for (const auto& ov : overrides) a(ov.i, ov.j) = ov.fn(t);
}

Mat WeightSchedule::eval(double t) const {
    Mat a = stepped(t);
    apply_overrides(t, a);
    return a;
}

std::vector<double> WeightSchedule::event_times_in(double t0, double t1) const {
    std::vector<double> out;
    for (const auto& ev : events)
        if (ev.time > t0 && ev.time < t1) out.push_back(ev.time);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double DisturbanceModel::sup_bound() const {
    switch (kind) {
        case Kind::None:
            return 0.0;
        case Kind::TruncatedGauss:
            return bound;
        case Kind::Uniform:
            return std::max(std::abs(lo), std::abs(hi));
        case Kind::Table: {
            double m = 0.0;
            for (const auto& v : table) m = std::max(m, v.lpNorm<Eigen::Infinity>());
            return m;
        }
    }
    return 0.0;
}

Mat NetworkSystem::adjacency_at(double t) const {
    return schedule ? schedule->eval(t) : a;
}

void NetworkSystem::validate() const {
    require(n >= 1, "network: n must be positive");
    require(a.rows() == n && a.cols() == n, "network: adjacency must be n x n");
    require_finite(a, "network: adjacency");
    require(b.rows() == n && b.cols() >= 1, "network: B must have n rows");
    for (Eigen::Index i = 0; i < b.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j)
            require(b(i, j) == 0.0 || b(i, j) == 1.0, "network: B entries must be 0/1");
    if (schedule) schedule->validate(n);
    if (disturbance.kind == DisturbanceModel::Kind::Uniform)
        require(disturbance.lo < disturbance.hi, "network: uniform disturbance needs lo < hi");
    if (disturbance.kind == DisturbanceModel::Kind::TruncatedGauss)
        require(disturbance.sigma >= 0.0 && disturbance.bound > 0.0,
                "network: truncated-gauss needs sigma >= 0 and bound > 0");
}

NetworkSystem gen_random_network(int n, RngStream& rng, GraphKind kind) {
    require(n >= 2, "gen_random_network: n must be >= 2");
    NetworkSystem net;
    net.n = n;
    net.a = Mat::Zero(n, n);
    if (kind == GraphKind::Undirected) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double w = rng.uniform(0.0, 1.0);
                net.a(i, j) = w;
                net.a(j, i) = w;
            }
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) net.a(i, j) = rng.uniform(0.0, 1.0);
    }
    net.b = Mat::Identity(n, n);
    return net;
}

Mat laplacian(const Mat& adjacency) {
    const auto n = adjacency.rows();
    require(adjacency.cols() == n, "laplacian: matrix must be square");
    require_finite(adjacency, "laplacian: adjacency");
    require(adjacency.isApprox(adjacency.transpose(), 1e-12),
            "laplacian: adjacency must be symmetric");
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j)
                require(adjacency(i, j) >= 0.0,
                        "laplacian: off-diagonal weights must be nonnegative");

    Mat l = -adjacency;
    for (Eigen::Index i = 0; i < n; ++i) {
        double deg = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) deg += adjacency(i, j);
        l(i, i) = deg - adjacency(i, i);
    }
    return l;
}

bool is_connected(const Mat& adjacency) {
    const auto n = adjacency.rows();
    if (n == 0) return false;
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<Eigen::Index> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        const auto u = stack.back();
        stack.pop_back();
        for (Eigen::Index v = 0; v < n; ++v)
            if (v != u && adjacency(u, v) > 0.0 && !seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = true;
                stack.push_back(v);
            }
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

SampledSignal sample_disturbance(const DisturbanceModel& model, RngStream& rng,
                                 double horizon, int channels, double dt) {
    require(horizon > 0.0, "sample_disturbance: horizon must be > 0");
    require(channels >= 1, "sample_disturbance: channels must be >= 1");
    require(dt > 0.0, "sample_disturbance: dt must be > 0");

    SampledSignal sig;
    sig.hold = model.hold_period > 0.0 ? model.hold_period : dt;
    const auto count = static_cast<std::size_t>(std::ceil(horizon / sig.hold)) + 1;

    if (model.kind == DisturbanceModel::Kind::None) {
        sig.values.assign(1, Vec::Zero(channels));
        sig.realized_bound = 0.0;
        return sig;
    }

    sig.values.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        Vec v(channels);
        switch (model.kind) {
            case DisturbanceModel::Kind::TruncatedGauss:
                for (int c = 0; c < channels; ++c)
                    v(c) = std::clamp(rng.gauss(0.0, model.sigma), -model.bound, model.bound);
                break;
            case DisturbanceModel::Kind::Uniform:
                for (int c = 0; c < channels; ++c) v(c) = rng.uniform(model.lo, model.hi);
                break;
            case DisturbanceModel::Kind::Table:
                require(!model.table.empty(), "sample_disturbance: empty table");
                v = model.table[k % model.table.size()];
                require(v.size() == channels, "sample_disturbance: table width mismatch");
                break;
            case DisturbanceModel::Kind::None:
                break;
        }
        sig.realized_bound = std::max(sig.realized_bound, v.lpNorm<Eigen::Infinity>());
        sig.values.push_back(std::move(v));
    }
    return sig;
}

}  // namespace netid
