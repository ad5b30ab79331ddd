#pragma once

#include "netid/adaptive.hpp"
#include "netid/scenario.hpp"

#include <map>
#include <string>
#include <vector>

namespace netid {

/// Everything a scenario reports: per-sample series on the log's time grid
/// plus scalars summarized over the steady window (the final 20% of the
/// horizon, [steady_t0, steady_t1]).
struct MetricReport {
    std::vector<double> times;

    std::vector<double> topo_err_rel;   // |A_hat(t) - A(t)|_F / |A(t)|_F
    std::vector<double> tracking_err;   // |e(t)|_2
    std::vector<double> dispersion;     // max_i x_i - min_i x_i
    std::vector<double> ramp_dev;       // max_i |x_i(t) - t|
    std::map<std::string, std::vector<double>> link_est;   // "a_1_2" -> estimate
    std::map<std::string, std::vector<double>> link_true;  // ground truth

    DiagnosticsReport diagnostics;
    bool k_star_available = false;

    PeResult pe;
    bool pe_computed = false;

    std::vector<DetectionEvent> detections;

    double steady_t0 = 0.0, steady_t1 = 0.0;
    double final_topo_err = 0.0;
    double steady_topo_err_mean = 0.0;
    double final_tracking_err = 0.0;
    double steady_tracking_err_max = 0.0;
    double steady_dispersion_max = 0.0;
    double steady_ramp_dev_max = 0.0;
    std::map<std::string, double> link_steady_std;      // std of the estimate
    std::map<std::string, double> link_steady_sup_dev;  // sup |est - true|

    bool diverged = false;
    double diverged_time = 0.0;
    double rho = 0.0;
    double disturbance_bound_declared = 0.0;
    double disturbance_bound_realized = 0.0;
};

/// Monitored-link column name, 1-based to match the usual a_ij notation.
std::string link_name(int i, int j);

MetricReport compute_metrics(const Scenario& sc, const BuiltScenario& built,
                             const TrajectoryLog& log);

}  // namespace netid
