#include "netid/reference.hpp"

#include "netid/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace netid {

Vec ReferenceSignal::eval(double t) const {
    Vec out(channels());
    eval_into(t, out);
    return out;
}

void ReferenceSignal::eval_into(double t, Vec& out) const {
    switch (kind) {
        case Kind::SinusoidBank:
            for (Eigen::Index i = 0; i < amplitude.size(); ++i)
                out(i) = amplitude(i) * std::sin(frequency(i) * t);
            return;
        case Kind::Step:
            out = level;
            return;
        case Kind::Table: {
            // previous-sample hold
            auto it = std::upper_bound(table_times.begin(), table_times.end(), t);
            if (it == table_times.begin()) {
                out.setZero();
                return;
            }
            out = table_values[static_cast<std::size_t>(it - table_times.begin()) - 1];
            return;
        }
    }
    throw ArgumentError("reference signal: unknown kind");
}

int ReferenceSignal::channels() const {
    switch (kind) {
        case Kind::SinusoidBank: return static_cast<int>(amplitude.size());
        case Kind::Step: return static_cast<int>(level.size());
        case Kind::Table: return table_values.empty() ? 0 : static_cast<int>(table_values.front().size());
    }
    return 0;
}

void ReferenceSignal::validate() const {
    switch (kind) {
        case Kind::SinusoidBank:
            require(amplitude.size() >= 1 && amplitude.size() == frequency.size(),
                    "reference signal: amplitude/frequency size mismatch");
            require_finite(amplitude, "reference signal: amplitude");
            require_finite(frequency, "reference signal: frequency");
            require((frequency.array() > 0.0).all(),
                    "reference signal: frequencies must be positive");
            break;
        case Kind::Step:
            require(level.size() >= 1, "reference signal: empty step level");
            require_finite(level, "reference signal: level");
            break;
        case Kind::Table:
            require(!table_times.empty() && table_times.size() == table_values.size(),
                    "reference signal: table size mismatch");
            require(std::is_sorted(table_times.begin(), table_times.end()),
                    "reference signal: table times must be sorted");
            break;
    }
}

ReferenceSignal ReferenceSignal::zero(int n) {
    ReferenceSignal s;
    s.kind = Kind::Step;
    s.level = Vec::Zero(n);
    return s;
}

ReferenceSignal ReferenceSignal::step(const Vec& level) {
    ReferenceSignal s;
    s.kind = Kind::Step;
    s.level = level;
    return s;
}

ReferenceSignal pe_sinusoid_bank(int n, RngStream& rng) {
    require(n >= 1, "pe_sinusoid_bank: n must be >= 1");
    ReferenceSignal s;
    s.kind = ReferenceSignal::Kind::SinusoidBank;
    s.amplitude = Vec(n);
    s.frequency = Vec(n);
    for (int i = 0; i < n; ++i) {
        s.amplitude(i) = rng.uniform(1.0, 2.0);
        s.frequency(i) = rng.uniform(1.0, 2.0);
    }
    return s;
}

ReferenceSignal pe_sinusoid_bank_structured(int n, double w0) {
    require(n >= 1, "pe_sinusoid_bank_structured: n must be >= 1");
    require(w0 > 0.0, "pe_sinusoid_bank_structured: w0 must be > 0");
    ReferenceSignal s;
    s.kind = ReferenceSignal::Kind::SinusoidBank;
    s.amplitude = Vec::Ones(n);
    s.frequency = Vec(n);
    for (int i = 0; i < n; ++i) s.frequency(i) = (i + 1) * w0;
    return s;
}

ReferenceSignal synchronized_sinusoid(int n, RngStream& rng) {
    require(n >= 1, "synchronized_sinusoid: n must be >= 1");
    ReferenceSignal s;
    s.kind = ReferenceSignal::Kind::SinusoidBank;
    const double amp = rng.uniform(1.0, 2.0);
    const double w = rng.uniform(1.0, 2.0);
    s.amplitude = Vec::Constant(n, amp);
    s.frequency = Vec::Constant(n, w);
    return s;
}

ReferenceModel design_reference(int n, const ReferenceDesign& design) {
    require(n >= 1, "design_reference: n must be >= 1");
    ReferenceModel ref;
    ref.a_m = design.a_m.value_or(-Mat::Identity(n, n));
    ref.b = design.b.value_or(Mat::Identity(n, n));
    require(ref.a_m.rows() == n && ref.a_m.cols() == n, "design_reference: A_m must be n x n");
    require(ref.b.rows() == n, "design_reference: B must have n rows");
    require_finite(ref.a_m, "design_reference: A_m");
    require_finite(ref.b, "design_reference: B");

    if (design.l_star) {
        ref.l_star = *design.l_star;
        require(ref.l_star.rows() == ref.b.cols() && ref.l_star.cols() == n,
                "design_reference: L* must be m x n");
    } else {
        require(design.pole < 0.0, "design_reference: closed-loop pole must be negative");
        if (ref.b.cols() != n)
            throw DesignError(
                "design_reference: B is not square; the pole-placement construction "
                "needs B invertible - provide l_star explicitly");
        Eigen::FullPivLU<Mat> lu(ref.b);
        if (!lu.isInvertible())
            throw DesignError(
                "design_reference: B is singular; provide l_star explicitly");
        ref.l_star = lu.solve(design.pole * Mat::Identity(n, n) - ref.a_m);
    }

    const Mat a_cl = ref.a_cl();
    if (!is_hurwitz(a_cl))
        throw DesignError("design_reference: A_m + B L* is not Hurwitz");

    if (design.q) {
        ref.q = *design.q;
    } else if (a_cl.isApprox(-Mat::Identity(n, n), 1e-12)) {
        ref.q = 2.0 * Mat::Identity(n, n);  // gives P = I for A_cl = -I
    } else {
        ref.q = Mat::Identity(n, n);
    }
    ref.p = solve_lyapunov(a_cl, ref.q);

    const double residual =
        (a_cl.transpose() * ref.p + ref.p * a_cl + ref.q).norm() / ref.q.norm();
    if (residual > 1e-10)
        throw NumericalError("design_reference: Lyapunov residual too large");

    ref.r = design.signal;
    if (ref.r.channels() == 0) ref.r = ReferenceSignal::zero(static_cast<int>(ref.b.cols()));
    ref.r.validate();
    require(ref.r.channels() == ref.b.cols(),
            "design_reference: reference signal channels must match B columns");
    return ref;
}

namespace {

double window_min_eig(const std::vector<double>& times, const std::vector<Vec>& states,
                      std::size_t start_idx, double window) {
    const double t0 = times[start_idx];
    return min_eig_symmetric(gramian(times, states, t0, t0 + window));
}

}  // namespace

PeResult check_pe(const std::vector<double>& times, const std::vector<Vec>& states,
                  double window, double alpha, ExecPolicy policy) {
    require(times.size() == states.size() && times.size() >= 2,
            "check_pe: need a sampled trajectory");
    require(window > 0.0, "check_pe: window must be > 0");
    const double span = times.back() - times.front();
    require(span >= window, "check_pe: trajectory shorter than window");

    // Window starts aligned to the sample grid, stride T/10.
    const double mean_dt = span / static_cast<double>(times.size() - 1);
    const auto stride =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(window / 10.0 / mean_dt)));

    std::vector<std::size_t> starts;
    for (std::size_t i = 0; i < times.size(); i += stride) {
        if (times[i] + window > times.back()) break;
        starts.push_back(i);
    }
    if (starts.empty()) starts.push_back(0);

    PeResult res;
    res.window = window;
    res.alpha = alpha;
    res.windows_checked = static_cast<int>(starts.size());

    std::vector<double> eigs(starts.size());
    if (policy == ExecPolicy::Parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t w = 0; w < static_cast<std::int64_t>(starts.size()); ++w)
            eigs[static_cast<std::size_t>(w)] =
                window_min_eig(times, states, starts[static_cast<std::size_t>(w)], window);
    } else {
        for (std::size_t w = 0; w < starts.size(); ++w)
            eigs[w] = window_min_eig(times, states, starts[w], window);
    }

    res.min_eig_over_windows = *std::min_element(eigs.begin(), eigs.end());
    res.satisfied = res.min_eig_over_windows >= alpha;
    return res;
}

}  // namespace netid
