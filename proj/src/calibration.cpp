#include "netid/calibration.hpp"

#include "netid/batch.hpp"
#include "netid/config.hpp"
#include "netid/metrics.hpp"
#include "netid/types.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <fstream>

namespace netid {

namespace {

constexpr double kMargin = 1.5;

double require_bound(double worst, const char* what) {
    if (!(worst > 0.0))
        throw NumericalError(std::string("calibrate: no observations for ") + what);
    return kMargin * worst;
}

std::string today() {
    std::time_t t = std::time(nullptr);
    char buf[16];
    std::strftime(buf, sizeof buf, "%Y-%m-%d", std::gmtime(&t));
    return buf;
}

}  // namespace

Calibration load_calibration(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("calibration: cannot open '" + path + "'");
    Json j;
    in >> j;
    Calibration cal;
    const auto& p = j.at("pinned");
    cal.baseline_topo_err_max = p.at("baseline_topo_err_max").get<double>();
    cal.link_estimate_tol = p.at("link_estimate_tol").get<double>();
    cal.disturbance_std_ratio_max = p.at("disturbance_std_ratio_max").get<double>();
    cal.unident_topo_err_min = p.at("unident_topo_err_min").get<double>();
    cal.sync_dispersion_max = p.at("sync_dispersion_max").get<double>();
    const auto& c = j.at("calibrated");
    cal.baseline_20seed_horizon = c.at("baseline_20seed_horizon").get<double>();
    cal.detection_latency_max = c.at("detection_latency_max").get<double>();
    cal.detection_median_window = c.at("detection_median_window").get<double>();
    cal.tv_lag_max = c.at("tv_lag_max").get<double>();
    cal.tracking_steady_err_max = c.at("tracking_steady_err_max").get<double>();
    cal.sync_ramp_dev_max = c.at("sync_ramp_dev_max").get<double>();
    cal.unident_steady_err_max = c.at("unident_steady_err_max").get<double>();
    cal.sliding_no_dist_dev_max = c.at("sliding_no_dist_dev_max").get<double>();
    cal.pe_alpha_default = c.at("pe_alpha_default").get<double>();
    const auto& prov = j.at("provenance");
    cal.generated = prov.at("generated").get<std::string>();
    cal.seeds = prov.at("seeds").get<std::vector<std::uint64_t>>();
    cal.dt = prov.at("dt").get<double>();
    return cal;
}

void save_calibration(const std::string& path, const Calibration& cal) {
    Json j;
    j["pinned"] = {{"baseline_topo_err_max", cal.baseline_topo_err_max},
                   {"link_estimate_tol", cal.link_estimate_tol},
                   {"disturbance_std_ratio_max", cal.disturbance_std_ratio_max},
                   {"unident_topo_err_min", cal.unident_topo_err_min},
                   {"sync_dispersion_max", cal.sync_dispersion_max}};
    j["calibrated"] = {{"baseline_20seed_horizon", cal.baseline_20seed_horizon},
                       {"detection_latency_max", cal.detection_latency_max},
                       {"detection_median_window", cal.detection_median_window},
                       {"tv_lag_max", cal.tv_lag_max},
                       {"tracking_steady_err_max", cal.tracking_steady_err_max},
                       {"sync_ramp_dev_max", cal.sync_ramp_dev_max},
                       {"unident_steady_err_max", cal.unident_steady_err_max},
                       {"sliding_no_dist_dev_max", cal.sliding_no_dist_dev_max},
                       {"pe_alpha_default", cal.pe_alpha_default}};
    j["provenance"] = {
        {"generated", cal.generated}, {"seeds", cal.seeds}, {"dt", cal.dt}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("calibration: cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

Calibration run_calibration(const std::vector<std::uint64_t>& seeds, bool verbose) {
    require(!seeds.empty(), "calibrate: need at least one seed");
    Calibration cal;
    cal.generated = today();
    cal.seeds = seeds;

    const auto say = [&](const char* fmt, double v) {
        if (verbose) std::printf(fmt, v);
    };

    // Baseline 20-seed identification at the extended horizon; the same runs
    // establish the PE floor for the scenario-level satisfied verdict.
    {
        std::vector<Scenario> runs;
        for (auto s : seeds) {
            auto sc = scenario_baseline(s);
            sc.horizon = cal.baseline_20seed_horizon;
            runs.push_back(sc);
        }
        const auto items = run_batch(runs, ExecPolicy::Parallel);
        double worst = 0.0;
        double min_eig = 1e300;
        for (const auto& it : items) {
            if (it.failed) throw NumericalError("calibrate: baseline run failed: " + it.error);
            worst = std::max(worst, it.report.final_topo_err);
            if (!it.report.pe_computed)
                throw NumericalError("calibrate: baseline PE was not computed");
            min_eig = std::min(min_eig, it.report.pe.min_eig_over_windows);
        }
        if (worst >= cal.baseline_topo_err_max)
            throw NumericalError(
                "calibrate: baseline identification misses the pinned threshold at the "
                "extended horizon");
        cal.pe_alpha_default = 0.5 * min_eig;
        say("  baseline worst final topology error: %.4f\n", worst);
        say("  PE alpha default: %.5f\n", cal.pe_alpha_default);
    }

    // Detection latency on the link-failure scenario.
    {
        std::vector<Scenario> runs;
        for (auto s : seeds) runs.push_back(scenario_link_failure(s));
        const auto items = run_batch(runs, ExecPolicy::Parallel);
        double worst = 0.0;
        cal.detection_median_window = runs.front().metrics.detect_median_window;
        for (const auto& it : items) {
            if (it.failed)
                throw NumericalError("calibrate: link-failure run failed: " + it.error);
            if (it.report.detections.size() != 1)
                throw NumericalError(
                    "calibrate: expected exactly one detection on seed " +
                    std::to_string(it.scenario.seed) + ", got " +
                    std::to_string(it.report.detections.size()));
            worst = std::max(worst,
                             it.report.detections.front().detected_time - 250.0);
        }
        cal.detection_latency_max = require_bound(worst, "detection latency");
        say("  worst detection latency: %.2f\n", worst);
    }

    // Time-varying lag, with the directional W/2 cross-check.
    {
        const std::size_t tv_count = std::min<std::size_t>(seeds.size(), 5);
        std::vector<Scenario> runs;
        for (std::size_t i = 0; i < tv_count; ++i) {
            runs.push_back(scenario_time_varying(seeds[i]));
            auto half = scenario_time_varying(seeds[i]);
            half.adaptive.w_scale = 5.0;
            runs.push_back(half);
        }
        const auto items = run_batch(runs, ExecPolicy::Parallel);
        double worst = 0.0;
        for (std::size_t i = 0; i < tv_count; ++i) {
            const auto& full = items[2 * i];
            const auto& half = items[2 * i + 1];
            if (full.failed || half.failed)
                throw NumericalError("calibrate: time-varying run failed");
            const auto name = link_name(0, 1);
            const double lag_full = full.report.link_steady_sup_dev.at(name);
            const double lag_half = half.report.link_steady_sup_dev.at(name);
            if (!(lag_half < lag_full))
                throw NumericalError(
                    "calibrate: halving W did not shrink the tracking lag on seed " +
                    std::to_string(full.scenario.seed));
            worst = std::max(worst, lag_full);
        }
        cal.tv_lag_max = require_bound(worst, "time-varying lag");
        say("  worst time-varying lag: %.4f\n", worst);
    }

    // Tracking scenario steady error.
    {
        std::vector<Scenario> runs;
        for (auto s : seeds) runs.push_back(scenario_tracking(s));
        const auto items = run_batch(runs, ExecPolicy::Parallel);
        double worst = 0.0;
        for (const auto& it : items) {
            if (it.failed) throw NumericalError("calibrate: tracking run failed: " + it.error);
            worst = std::max(worst, it.report.steady_tracking_err_max);
        }
        cal.tracking_steady_err_max = require_bound(worst, "tracking steady error");
        say("  worst tracking steady error: %.4f\n", worst);
    }

    // Synchronization ramp deviation.
    {
        std::vector<Scenario> runs;
        for (auto s : seeds) runs.push_back(scenario_synchronization(s));
        const auto items = run_batch(runs, ExecPolicy::Parallel);
        double worst = 0.0;
        for (const auto& it : items) {
            if (it.failed)
                throw NumericalError("calibrate: synchronization run failed: " + it.error);
            if (it.report.steady_dispersion_max >= cal.sync_dispersion_max)
                throw NumericalError("calibrate: synchronization dispersion misses the "
                                     "pinned threshold on seed " +
                                     std::to_string(it.scenario.seed));
            worst = std::max(worst, it.report.steady_ramp_dev_max);
        }
        cal.sync_ramp_dev_max = require_bound(worst, "synchronization ramp deviation");
        say("  worst ramp deviation: %.4f\n", worst);
    }

    // Unidentifiable scenario: tracking still converges, topology does not.
    {
        std::vector<Scenario> runs;
        for (auto s : seeds) runs.push_back(scenario_unidentifiable(s));
        const auto items = run_batch(runs, ExecPolicy::Parallel);
        double worst_err = 0.0;
        double min_pe = 1e300;
        for (const auto& it : items) {
            if (it.failed)
                throw NumericalError("calibrate: unidentifiable run failed: " + it.error);
            worst_err = std::max(worst_err, it.report.steady_tracking_err_max);
            if (it.report.pe_computed)
                min_pe = std::min(min_pe, it.report.pe.min_eig_over_windows);
        }
        cal.unident_steady_err_max = require_bound(worst_err, "unidentifiable steady error");
        say("  worst unidentifiable steady tracking error: %.5f\n", worst_err);
    }

    // Sliding vs plain with no disturbance: boundary-layer-induced deviation.
    {
        const std::size_t dev_count = std::min<std::size_t>(seeds.size(), 5);
        std::vector<Scenario> runs;
        for (std::size_t i = 0; i < dev_count; ++i) {
            auto plain = scenario_baseline(seeds[i]);
            auto robust = scenario_disturbance(seeds[i], true);
            robust.disturbance.kind = "none";
            runs.push_back(plain);
            runs.push_back(robust);
        }
        const auto items = run_batch(runs, ExecPolicy::Parallel);
        double worst = 0.0;
        for (std::size_t i = 0; i < dev_count; ++i) {
            const auto& plain = items[2 * i];
            const auto& robust = items[2 * i + 1];
            if (plain.failed || robust.failed)
                throw NumericalError("calibrate: sliding-deviation run failed");
            const auto& a = plain.report.tracking_err;
            const auto& b = robust.report.tracking_err;
            const std::size_t len = std::min(a.size(), b.size());
            for (std::size_t k = 0; k < len; ++k)
                worst = std::max(worst, std::abs(a[k] - b[k]));
        }
        cal.sliding_no_dist_dev_max = require_bound(worst, "sliding deviation");
        say("  worst no-disturbance sliding deviation: %.5f\n", worst);
    }

    return cal;
}

}  // namespace netid
