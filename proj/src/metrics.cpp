#include "netid/metrics.hpp"

#include "netid/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace netid {

std::string link_name(int i, int j) {
    return "a_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
}

namespace {

double series_mean(const std::vector<double>& v, std::size_t lo) {
    if (lo >= v.size()) return 0.0;
    double sum = 0.0;
    for (std::size_t i = lo; i < v.size(); ++i) sum += v[i];
    return sum / static_cast<double>(v.size() - lo);
}

double series_max(const std::vector<double>& v, std::size_t lo) {
    double m = 0.0;
    for (std::size_t i = lo; i < v.size(); ++i) m = std::max(m, v[i]);
    return m;
}

double series_std(const std::vector<double>& v, std::size_t lo) {
    if (lo + 1 >= v.size()) return 0.0;
    const double mean = series_mean(v, lo);
    double sq = 0.0;
    for (std::size_t i = lo; i < v.size(); ++i) sq += (v[i] - mean) * (v[i] - mean);
    return std::sqrt(sq / static_cast<double>(v.size() - lo));
}

double default_pe_window(const ReferenceModel& ref) {
    // A randomly drawn bank can carry two nearly equal frequencies; telling
    // them apart needs a window on the order of their beat period, far more
    // than one period of the slowest channel. 100 time units covers the
    // U(1,2) default draw comfortably.
    if (ref.r.kind == ReferenceSignal::Kind::SinusoidBank) return 100.0;
    return 10.0;
}

}  // namespace

MetricReport compute_metrics(const Scenario& sc, const BuiltScenario& built,
                             const TrajectoryLog& log) {
    MetricReport rep;
    rep.times = log.times;
    rep.diverged = log.diverged;
    rep.diverged_time = log.diverged_time;
    rep.rho = log.rho;
    rep.disturbance_bound_declared = log.disturbance_bound_declared;
    rep.disturbance_bound_realized = log.disturbance_bound_realized;

    const std::size_t len = log.size();
    const auto& ms = sc.metrics;

    // steady window: the final 20% of the horizon
    rep.steady_t1 = sc.horizon;
    rep.steady_t0 = 0.8 * sc.horizon;
    std::size_t steady_lo = len;
    for (std::size_t i = 0; i < len; ++i)
        if (log.times[i] >= rep.steady_t0) {
            steady_lo = i;
            break;
        }

    const bool schedule_static = !built.plant.schedule || built.plant.schedule->is_static();
    const Mat a_static = built.plant.a;

    if (ms.topology) {
        rep.topo_err_rel.resize(len);
        for (std::size_t i = 0; i < len; ++i) {
            const Mat a_true =
                schedule_static ? a_static : built.plant.adjacency_at(log.times[i]);
            const auto est = recover_topology(log.k[i], built.ref.a_m, built.plant.b);
            const double denom = std::max(a_true.norm(), 1e-300);
            rep.topo_err_rel[i] = (est.a_hat - a_true).norm() / denom;
        }
        rep.final_topo_err = rep.topo_err_rel.back();
        rep.steady_topo_err_mean = series_mean(rep.topo_err_rel, steady_lo);
    }

    if (ms.tracking) {
        rep.tracking_err.resize(len);
        for (std::size_t i = 0; i < len; ++i) rep.tracking_err[i] = log.e[i].norm();
        rep.final_tracking_err = rep.tracking_err.back();
        rep.steady_tracking_err_max = series_max(rep.tracking_err, steady_lo);
    }

    if (ms.dispersion) {
        rep.dispersion.resize(len);
        for (std::size_t i = 0; i < len; ++i)
            rep.dispersion[i] = log.x[i].maxCoeff() - log.x[i].minCoeff();
        rep.steady_dispersion_max = series_max(rep.dispersion, steady_lo);
    }

    if (ms.ramp) {
        rep.ramp_dev.resize(len);
        for (std::size_t i = 0; i < len; ++i)
            rep.ramp_dev[i] =
                (log.x[i].array() - log.times[i]).abs().maxCoeff();
        rep.steady_ramp_dev_max = series_max(rep.ramp_dev, steady_lo);
    }

    for (const auto& link : ms.links) {
        const std::string name = link_name(link[0], link[1]);
        auto& est_series = rep.link_est[name];
        auto& true_series = rep.link_true[name];
        est_series.resize(len);
        true_series.resize(len);
        for (std::size_t i = 0; i < len; ++i) {
            const auto est = recover_topology(log.k[i], built.ref.a_m, built.plant.b);
            est_series[i] = est.a_hat(link[0], link[1]);
            const Mat a_true =
                schedule_static ? a_static : built.plant.adjacency_at(log.times[i]);
            true_series[i] = a_true(link[0], link[1]);
        }
        rep.link_steady_std[name] = series_std(est_series, steady_lo);
        double sup = 0.0;
        for (std::size_t i = steady_lo; i < len; ++i)
            sup = std::max(sup, std::abs(est_series[i] - true_series[i]));
        rep.link_steady_sup_dev[name] = sup;
    }

    if (ms.pe && len >= 2) {
        const double window =
            ms.pe_window > 0.0 ? ms.pe_window : default_pe_window(built.ref);
        if (log.times.back() - log.times.front() >= window) {
            rep.pe = check_pe(log.times, log.x_m, window, ms.pe_alpha);
            rep.pe_computed = true;
        }
    }

    if (ms.lyapunov) {
        std::optional<Mat> k_star;
        if (schedule_static) {
            const auto mg = matched_gain(a_static, built.ref.a_m, built.plant.b);
            if (mg.feasible) k_star = mg.k;
        }
        rep.k_star_available = k_star.has_value();
        rep.diagnostics = lyapunov_diagnostics(log, built.ref, built.cfg, built.scfg, k_star);
    }

    if (ms.detect && !ms.links.empty()) {
        const auto& link = ms.links.front();
        const std::string name = link_name(link[0], link[1]);
        const double warmup =
            ms.detect_warmup >= 0.0 ? ms.detect_warmup : 0.2 * sc.horizon;
        rep.detections = detect_changes(log.times, rep.link_est[name],
                                        ms.detect_threshold, ms.detect_dwell,
                                        ms.detect_median_window, warmup);
        for (auto& ev : rep.detections) {
            ev.i = link[0];
            ev.j = link[1];
        }
    }

    return rep;
}

}  // namespace netid
