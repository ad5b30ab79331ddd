#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace netid {

// Frozen thresholds for the regression suite. The pinned values restate
// design constants; the calibrated ones come from oracle pre-runs
// (regenerate with `netid calibrate`) and carry a 1.5x safety margin over
// the worst observation across the committed seed set.
struct Calibration {
    // pinned
    double baseline_topo_err_max = 0.05;
    double link_estimate_tol = 0.05;
    double disturbance_std_ratio_max = 0.2;
    double unident_topo_err_min = 0.5;
    double sync_dispersion_max = 0.05;

    // calibrated
    double baseline_20seed_horizon = 1000.0;
    double detection_latency_max = 0.0;
    double detection_median_window = 201.0;  // samples, detector default at calibration
    double tv_lag_max = 0.0;
    double tracking_steady_err_max = 0.0;
    double sync_ramp_dev_max = 0.0;
    double unident_steady_err_max = 0.0;
    double sliding_no_dist_dev_max = 0.0;
    double pe_alpha_default = 0.01;

    // provenance
    std::string generated;
    std::vector<std::uint64_t> seeds;
    double dt = 1e-3;
};

Calibration load_calibration(const std::string& path);
void save_calibration(const std::string& path, const Calibration& cal);

/// Re-derive every calibrated threshold by running the oracle pre-runs
/// across the given seeds. Throws if an oracle cannot establish a bound
/// (e.g. a change the detector never sees).
Calibration run_calibration(const std::vector<std::uint64_t>& seeds, bool verbose);

}  // namespace netid
