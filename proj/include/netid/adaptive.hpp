#pragma once

#include "netid/network.hpp"
#include "netid/reference.hpp"
#include "netid/types.hpp"

#include <optional>
#include <vector>

namespace netid {

enum class AdaptMode { Plain, Sliding };

/// Gain-adaptation weights: K'(t) = -W^-1 B' P e x'  (plain mode) or
/// K'(t) = -W^-1 B' G' P_s s x'  (sliding mode).
struct AdaptiveConfig {
    Mat w;   // m x m symmetric positive definite
    Mat k0;  // m x n initial gain K(0)
    AdaptMode mode = AdaptMode::Plain;

    void validate(int n, int m) const;
};

// Sliding-mode parameters. The switching input is -rho * M * sat(s) with
// sat(s) = s/|s| outside the boundary layer (|s| > delta) and s/delta
// inside; M = (P_s Gamma B)^-1 is fixed at configuration time.
struct SlidingConfig {
    Mat gamma;       // m x n, full rank
    Mat p_s;         // m x m symmetric positive definite
    Mat m_mat;       // (P_s Gamma B)^-1
    double rho = 0.0;
    double epsilon = 0.1;
    double delta = 1e-3;
    bool rho_auto = true;  // rho = |P_s Gamma B|_2 * sqrt(m) * d_max + epsilon
};

/// Build a sliding config with rho from the declared disturbance sup-norm
/// bound (converted to a 2-norm bound by sqrt(m)). Validates that
/// P_s Gamma B is invertible with inversion residual <= 1e-12.
SlidingConfig make_sliding_config(const Mat& gamma, const Mat& p_s, const Mat& b,
                                  double epsilon, double delta, double d_max_inf);

/// Same, but with an explicitly chosen rho.
SlidingConfig make_sliding_config_fixed_rho(const Mat& gamma, const Mat& p_s,
                                            const Mat& b, double rho,
                                            double epsilon, double delta);

/// Defaults: Gamma = I when B = I, else Gamma = B'; P_s = I.
SlidingConfig default_sliding_config(const Mat& b, double epsilon, double delta,
                                     double d_max_inf);

/// Boundary-layer saturation; globally (1/delta)-Lipschitz.
Vec sat(const Vec& s, double delta);

/// State of the coupled closed loop. The tracking error e = x - x_m is
/// always derived, never stored. z carries the sliding-surface integral
/// state (empty in plain mode).
struct ClosedLoopState {
    Vec x;
    Vec x_m;
    Mat k;  // m x n
    Vec z;  // m, sliding mode only

    Vec error() const { return x - x_m; }
};

int state_dim(int n, int m, AdaptMode mode);
Vec pack_state(const ClosedLoopState& s, AdaptMode mode);
ClosedLoopState unpack_state(const Vec& y, int n, int m, AdaptMode mode);

/// Sliding surface s = Gamma e - z, where z' = Gamma (A_m + B L*) e with
/// z(0) = 0; at t = 0 the integral is empty, so s(0) = Gamma e(0).
Vec sliding_surface(const ClosedLoopState& state, const SlidingConfig& scfg);

/// Ideal matching gain: least-squares solve of B K = A_m - A. Feasible iff
/// the residual is <= 1e-9. Harness-side ground truth; the controller
/// itself never sees A.
struct MatchedGain {
    bool feasible = false;
    Mat k;
    double residual = 0.0;
};
MatchedGain matched_gain(const Mat& a, const Mat& a_m, const Mat& b);

/// Single evaluation of the plain-mode closed-loop derivative at (t, state):
/// u = K x + L* e + r;  x' = A(t) x + B (u + d);  x_m' = A_m x_m + B r;
/// K' = -W^-1 B' P e x'. d defaults to zero.
Vec plain_rhs(const ClosedLoopState& state, double t, const NetworkSystem& plant,
              const ReferenceModel& ref, const AdaptiveConfig& cfg,
              const Vec* d = nullptr);

/// Sliding-mode counterpart: u gains the switching term -rho M sat(s),
/// K' = -W^-1 B' Gamma' P_s s x', and z' = Gamma (A_m + B L*) e.
Vec sliding_rhs(const ClosedLoopState& state, double t, const NetworkSystem& plant,
                const ReferenceModel& ref, const AdaptiveConfig& cfg,
                const SlidingConfig& scfg, const Vec* d = nullptr);

/// Topology estimate read off the adaptive gain: A_hat = A_m - B K.
/// Rows of A unreachable through B (all-zero rows of B) are flagged
/// not-recoverable in the mask rather than silently kept.
struct TopologyEstimate {
    Mat a_hat;
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> recoverable_mask;
    double residual_norm = 0.0;
};
TopologyEstimate recover_topology(const Mat& k, const Mat& a_m, const Mat& b);

struct RunOptions {
    double t_end = 0.0;
    double dt = 1e-3;
    int decimation = 10;           // log every decimation-th step
    std::optional<Vec> x0;         // default: entries ~ N(0,1) from rng
    std::optional<Vec> xm0;        // default: zero
    bool xm0_equals_x0 = false;    // overrides xm0
};

/// Time-indexed record of a closed-loop run; the unit of export and testing.
struct TrajectoryLog {
    int n = 0, m = 0;
    AdaptMode mode = AdaptMode::Plain;
    double dt = 0.0;
    int decimation = 1;

    std::vector<double> times;
    std::vector<Vec> x, x_m, e, u, d;
    std::vector<Mat> k;
    std::vector<Vec> s;            // sliding mode only
    std::vector<double> s_norm;    // sliding mode only
    std::vector<double> v_err;     // error term of V: e'Pe/2 (plain), s'P_s s/2 (sliding)

    bool diverged = false;
    double diverged_time = 0.0;
    double disturbance_bound_declared = 0.0;
    double disturbance_bound_realized = 0.0;
    double rho = 0.0;  // sliding mode only

    std::size_t size() const { return times.size(); }
};

/// Integrate the coupled closed loop with fixed-step RK4. Steps land
/// exactly on every weight-schedule event time (step changes take effect
/// at the start of the following segment), the disturbance is held
/// constant within each step (sample-and-hold), and the log is decimated.
/// If x0 is not supplied it is drawn from rng (N(0,1) per entry) before
/// the disturbance realization is sampled. Divergence returns the partial
/// log with the diverged marker set instead of throwing.
TrajectoryLog run_closed_loop(const NetworkSystem& plant, const ReferenceModel& ref,
                              const AdaptiveConfig& cfg,
                              const std::optional<SlidingConfig>& scfg,
                              const RunOptions& opt, RngStream& rng);

/// Lyapunov bookkeeping over a finished run. V = e'Pe/2 (plain) or
/// s'P_s s/2 (sliding), plus tr(K~' W K~)/2 when the true gain K* is
/// supplied; without K* the gain term is omitted and the flag cleared.
struct DiagnosticsReport {
    std::vector<double> v;
    std::vector<double> v_dot_fd;        // central differences on logged V
    std::vector<double> v_dot_analytic;  // plain mode: -e'Qe/2
    std::vector<double> reach_lhs;       // sliding: s'P_s Gamma B d - rho|s|
    std::vector<double> reach_margin;    // sliding: reach_lhs + epsilon|s|
    std::vector<char> outside_layer;     // sliding: |s| > delta
    bool k_tilde_included = false;
};
DiagnosticsReport lyapunov_diagnostics(const TrajectoryLog& log,
                                       const ReferenceModel& ref,
                                       const AdaptiveConfig& cfg,
                                       const std::optional<SlidingConfig>& scfg,
                                       const std::optional<Mat>& k_star);

}  // namespace netid
