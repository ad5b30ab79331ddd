#include "netid/adaptive.hpp"

#include "netid/linalg.hpp"
#include "netid/ode.hpp"

#include <algorithm>
#include <cmath>

namespace netid {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using KMap = Eigen::Map<RowMat>;
using ConstKMap = Eigen::Map<const RowMat>;

}  // namespace

void AdaptiveConfig::validate(int n, int m) const {
    require(w.rows() == m && w.cols() == m, "adaptive config: W must be m x m");
    require(w.isApprox(w.transpose(), 1e-12), "adaptive config: W must be symmetric");
    if (min_eig_symmetric(w) <= 0.0)
        throw DesignError("adaptive config: W must be positive definite");
    require(k0.rows() == m && k0.cols() == n, "adaptive config: K(0) must be m x n");
    require_finite(k0, "adaptive config: K(0)");
}

SlidingConfig make_sliding_config(const Mat& gamma, const Mat& p_s, const Mat& b,
                                  double epsilon, double delta, double d_max_inf) {
    require(epsilon > 0.0, "sliding config: epsilon must be > 0");
    const auto m = b.cols();
    const double d_max_2 = std::sqrt(static_cast<double>(m)) * d_max_inf;
    const double rho = spectral_norm(p_s * gamma * b) * d_max_2 + epsilon;
    SlidingConfig cfg = make_sliding_config_fixed_rho(gamma, p_s, b, rho, epsilon, delta);
    cfg.rho_auto = true;
    return cfg;
}

SlidingConfig make_sliding_config_fixed_rho(const Mat& gamma, const Mat& p_s,
                                            const Mat& b, double rho,
                                            double epsilon, double delta) {
    const auto n = b.rows();
    const auto m = b.cols();
    require(gamma.rows() == m && gamma.cols() == n, "sliding config: Gamma must be m x n");
    require(p_s.rows() == m && p_s.cols() == m, "sliding config: P_s must be m x m");
    require(p_s.isApprox(p_s.transpose(), 1e-12), "sliding config: P_s must be symmetric");
    if (min_eig_symmetric(p_s) <= 0.0)
        throw DesignError("sliding config: P_s must be positive definite");
    if (Eigen::FullPivLU<Mat>(gamma).rank() < std::min(m, n))
        throw DesignError("sliding config: Gamma must be full rank");
    require(rho > 0.0, "sliding config: rho must be > 0");
    require(delta > 0.0, "sliding config: delta must be > 0");
    require(epsilon > 0.0, "sliding config: epsilon must be > 0");

    SlidingConfig cfg;
    cfg.gamma = gamma;
    cfg.p_s = p_s;
    cfg.rho = rho;
    cfg.epsilon = epsilon;
    cfg.delta = delta;
    cfg.rho_auto = false;

    const Mat pgb = p_s * gamma * b;
    Eigen::FullPivLU<Mat> lu(pgb);
    if (!lu.isInvertible())
        throw DesignError("sliding config: P_s Gamma B is singular");
    cfg.m_mat = lu.inverse();
    const double residual =
        (pgb * cfg.m_mat - Mat::Identity(m, m)).lpNorm<Eigen::Infinity>();
    if (residual > 1e-12)
        throw NumericalError("sliding config: M = (P_s Gamma B)^-1 residual > 1e-12");
    return cfg;
}

SlidingConfig default_sliding_config(const Mat& b, double epsilon, double delta,
                                     double d_max_inf) {
    const auto n = b.rows();
    const auto m = b.cols();
    Mat gamma;
    if (n == m && b.isApprox(Mat::Identity(n, n), 1e-12))
        gamma = Mat::Identity(m, n);
    else
        gamma = b.transpose();  // P_s Gamma B = P_s B'B, invertible for full-rank B
    return make_sliding_config(gamma, Mat::Identity(m, m), b, epsilon, delta, d_max_inf);
}

Vec sat(const Vec& s, double delta) {
    require(delta > 0.0, "sat: delta must be > 0");
    const double ns = s.norm();
    return ns > delta ? Vec(s / ns) : Vec(s / delta);
}

int state_dim(int n, int m, AdaptMode mode) {
    return 2 * n + m * n + (mode == AdaptMode::Sliding ? m : 0);
}

Vec pack_state(const ClosedLoopState& s, AdaptMode mode) {
    const auto n = s.x.size();
    const auto m = s.k.rows();
    Vec y(state_dim(static_cast<int>(n), static_cast<int>(m), mode));
    y.segment(0, n) = s.x;
    y.segment(n, n) = s.x_m;
    KMap(y.data() + 2 * n, m, s.k.cols()) = s.k;
    if (mode == AdaptMode::Sliding)
        y.segment(2 * n + m * s.k.cols(), m) = s.z.size() == m ? s.z : Vec::Zero(m);
    return y;
}

ClosedLoopState unpack_state(const Vec& y, int n, int m, AdaptMode mode) {
    require(y.size() == state_dim(n, m, mode), "unpack_state: dimension mismatch");
    ClosedLoopState s;
    s.x = y.segment(0, n);
    s.x_m = y.segment(n, n);
    s.k = ConstKMap(y.data() + 2 * n, m, n);
    if (mode == AdaptMode::Sliding) s.z = y.segment(2 * n + m * n, m);
    return s;
}

Vec sliding_surface(const ClosedLoopState& state, const SlidingConfig& scfg) {
    require(state.z.size() == scfg.gamma.rows(), "sliding_surface: missing z state");
    return scfg.gamma * state.error() - state.z;
}

MatchedGain matched_gain(const Mat& a, const Mat& a_m, const Mat& b) {
    require(a.rows() == a.cols() && a_m.rows() == a_m.cols() && a.rows() == a_m.rows(),
            "matched_gain: A and A_m must be square of equal size");
    require(b.rows() == a.rows(), "matched_gain: B rows must match A");
    MatchedGain out;
    const Mat target = a_m - a;
    out.k = b.colPivHouseholderQr().solve(target);
    out.residual = (b * out.k - target).norm();
    out.feasible = out.residual <= 1e-9;
    return out;
}

TopologyEstimate recover_topology(const Mat& k, const Mat& a_m, const Mat& b) {
    require(b.rows() == a_m.rows() && b.cols() == k.rows() && k.cols() == a_m.cols(),
            "recover_topology: dimension mismatch");
    TopologyEstimate est;
    const Mat bk = b * k;
    est.a_hat = a_m - bk;
    est.recoverable_mask.resize(a_m.rows(), a_m.cols());
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
        const bool driven = b.row(i).cwiseAbs().sum() > 0.0;
        for (Eigen::Index j = 0; j < a_m.cols(); ++j) est.recoverable_mask(i, j) = driven;
    }
    est.residual_norm = (bk - (a_m - est.a_hat)).norm();
    return est;
}

namespace {

// Shared evaluator for the coupled closed-loop derivative. Holds every
// precomputable product and all scratch buffers so stepping allocates
// nothing. The adjacency is resolved per schedule segment (step events)
// plus per stage time (smooth overrides); the disturbance is a per-step
// constant set by the driver.
class ClosedLoopRhs {
public:
    ClosedLoopRhs(const NetworkSystem& plant, const ReferenceModel& ref,
                  const AdaptiveConfig& cfg, const SlidingConfig* scfg)
        : plant_(plant),
          ref_(ref),
          scfg_(scfg),
          n_(plant.n),
          m_(plant.inputs()),
          mode_(cfg.mode),
          a_seg_(plant.a),
          a_t_(plant.a),
          d_(Vec::Zero(plant.inputs())),
          e_(n_),
          r_(m_),
          u_(m_),
          bu_(n_),
          kv_(m_),
          s_(m_),
          sat_(m_) {
        const Mat w_inv = Eigen::LLT<Mat>(cfg.w).solve(Mat::Identity(m_, m_));
        if (mode_ == AdaptMode::Plain) {
            gain_map_ = w_inv * ref.b.transpose() * ref.p;  // m x n
        } else {
            gain_map_ = w_inv * ref.b.transpose() * scfg->gamma.transpose() * scfg->p_s;
            gamma_acl_ = scfg->gamma * ref.a_cl();  // m x n
        }
    }

    int dim() const { return state_dim(n_, m_, mode_); }

    /// Resolve step events for the segment starting at t_seg.
    void set_segment(double t_seg) {
        if (plant_.schedule) a_seg_ = plant_.schedule->stepped(t_seg);
        if (!has_overrides()) a_t_ = a_seg_;
    }

    void set_disturbance(const Vec& d) { d_ = d; }
    const Vec& disturbance() const { return d_; }

    bool has_overrides() const {
        return plant_.schedule && !plant_.schedule->overrides.empty();
    }

    void operator()(double t, const Vec& y, Vec& dy) {
        const auto x = y.segment(0, n_);
        const auto xm = y.segment(n_, n_);
        ConstKMap k(y.data() + 2 * n_, m_, n_);

        if (has_overrides()) {
            a_t_ = a_seg_;
            plant_.schedule->apply_overrides(t, a_t_);
        }

        e_ = x - xm;
        ref_.r.eval_into(t, r_);

        // u = K x + L* e + r  (- rho M sat(s) in sliding mode)
        u_.noalias() = k * x;
        u_.noalias() += ref_.l_star * e_;
        u_ += r_;

        if (mode_ == AdaptMode::Sliding) {
            const auto z = y.segment(2 * n_ + m_ * n_, m_);
            s_.noalias() = scfg_->gamma * e_;
            s_ -= z;
            const double ns = s_.norm();
            if (ns > scfg_->delta)
                sat_ = s_ / ns;
            else
                sat_ = s_ / scfg_->delta;
            u_.noalias() -= scfg_->rho * (scfg_->m_mat * sat_);
        }

        // x' = A(t) x + B (u + d)
        bu_ = u_ + d_;
        dy.segment(0, n_).noalias() = a_t_ * x;
        dy.segment(0, n_).noalias() += ref_.b * bu_;

        // x_m' = A_m x_m + B r
        dy.segment(n_, n_).noalias() = ref_.a_m * xm;
        dy.segment(n_, n_).noalias() += ref_.b * r_;

        // K' = -(gain_map * e) x'   resp.   -(gain_map * s) x'
        if (mode_ == AdaptMode::Plain)
            kv_.noalias() = gain_map_ * e_;
        else
            kv_.noalias() = gain_map_ * s_;
        KMap dk(dy.data() + 2 * n_, m_, n_);
        dk.noalias() = -kv_ * x.transpose();

        if (mode_ == AdaptMode::Sliding)
            dy.segment(2 * n_ + m_ * n_, m_).noalias() = gamma_acl_ * e_;
    }

    /// Control input at (t, y) with the current disturbance-independent terms.
    Vec control(double t, const Vec& y) {
        const auto x = y.segment(0, n_);
        const auto xm = y.segment(n_, n_);
        ConstKMap k(y.data() + 2 * n_, m_, n_);
        Vec e = x - xm;
        Vec r(m_);
        ref_.r.eval_into(t, r);
        Vec u = k * x + ref_.l_star * e + r;
        if (mode_ == AdaptMode::Sliding) {
            const auto z = y.segment(2 * n_ + m_ * n_, m_);
            Vec s = scfg_->gamma * e - z;
            u -= scfg_->rho * (scfg_->m_mat * sat(s, scfg_->delta));
        }
        return u;
    }

private:
    const NetworkSystem& plant_;
    const ReferenceModel& ref_;
    const SlidingConfig* scfg_;
    int n_, m_;
    AdaptMode mode_;

    Mat gain_map_;   // W^-1 B'P (plain) or W^-1 B'G'P_s (sliding), m x n / m x m
    Mat gamma_acl_;  // Gamma (A_m + B L*), m x n
    Mat a_seg_, a_t_;
    Vec d_, e_, r_, u_, bu_, kv_, s_, sat_;
};

void validate_run_inputs(const NetworkSystem& plant, const ReferenceModel& ref,
                         const AdaptiveConfig& cfg,
                         const std::optional<SlidingConfig>& scfg,
                         const RunOptions& opt) {
    plant.validate();
    require(ref.n() == plant.n, "run: plant and reference dimensions differ");
    require(ref.b.isApprox(plant.b, 1e-12), "run: plant and reference must share B");
    cfg.validate(plant.n, plant.inputs());
    if (cfg.mode == AdaptMode::Sliding)
        require(scfg.has_value(), "run: sliding mode needs a SlidingConfig");
    require(opt.t_end > 0.0, "run: t_end must be > 0");
    require(opt.dt > 0.0, "run: dt must be > 0");
    require(opt.decimation >= 1, "run: decimation must be >= 1");
    if (opt.x0) require(opt.x0->size() == plant.n, "run: x0 has wrong length");
    if (opt.xm0) require(opt.xm0->size() == plant.n, "run: xm0 has wrong length");
}

}  // namespace

Vec plain_rhs(const ClosedLoopState& state, double t, const NetworkSystem& plant,
              const ReferenceModel& ref, const AdaptiveConfig& cfg, const Vec* d) {
    require(cfg.mode == AdaptMode::Plain, "plain_rhs: config mode is not plain");
    cfg.validate(plant.n, plant.inputs());
    ClosedLoopRhs rhs(plant, ref, cfg, nullptr);
    rhs.set_segment(t);
    if (d) rhs.set_disturbance(*d);
    Vec y = pack_state(state, AdaptMode::Plain);
    require_finite(y, "plain_rhs: state");
    Vec dy(y.size());
    rhs(t, y, dy);
    if (!dy.allFinite()) throw DivergedError(t);
    return dy;
}

Vec sliding_rhs(const ClosedLoopState& state, double t, const NetworkSystem& plant,
                const ReferenceModel& ref, const AdaptiveConfig& cfg,
                const SlidingConfig& scfg, const Vec* d) {
    require(cfg.mode == AdaptMode::Sliding, "sliding_rhs: config mode is not sliding");
    cfg.validate(plant.n, plant.inputs());
    ClosedLoopRhs rhs(plant, ref, cfg, &scfg);
    rhs.set_segment(t);
    if (d) rhs.set_disturbance(*d);
    Vec y = pack_state(state, AdaptMode::Sliding);
    require_finite(y, "sliding_rhs: state");
    Vec dy(y.size());
    rhs(t, y, dy);
    if (!dy.allFinite()) throw DivergedError(t);
    return dy;
}

TrajectoryLog run_closed_loop(const NetworkSystem& plant, const ReferenceModel& ref,
                              const AdaptiveConfig& cfg,
                              const std::optional<SlidingConfig>& scfg,
                              const RunOptions& opt, RngStream& rng) {
    validate_run_inputs(plant, ref, cfg, scfg, opt);
    const int n = plant.n;
    const int m = plant.inputs();

    Vec x0;
    if (opt.x0) {
        x0 = *opt.x0;
    } else {
        x0 = Vec(n);
        for (int i = 0; i < n; ++i) x0(i) = rng.gauss(0.0, 1.0);
    }
    Vec xm0 = opt.xm0_equals_x0 ? x0 : (opt.xm0 ? *opt.xm0 : Vec::Zero(n));

    const SampledSignal dist =
        sample_disturbance(plant.disturbance, rng, opt.t_end, m, opt.dt);

    ClosedLoopRhs rhs(plant, ref, cfg, scfg ? &*scfg : nullptr);

    TrajectoryLog log;
    log.n = n;
    log.m = m;
    log.mode = cfg.mode;
    log.dt = opt.dt;
    log.decimation = opt.decimation;
    log.disturbance_bound_declared = plant.disturbance.sup_bound();
    log.disturbance_bound_realized = dist.realized_bound;
    if (scfg) log.rho = scfg->rho;

    ClosedLoopState init;
    init.x = x0;
    init.x_m = xm0;
    init.k = cfg.k0;
    if (cfg.mode == AdaptMode::Sliding) init.z = Vec::Zero(m);
    Vec y = pack_state(init, cfg.mode);

    const auto expected =
        static_cast<std::size_t>(opt.t_end / opt.dt / opt.decimation) + 4;
    log.times.reserve(expected);

    const auto log_sample = [&](double t, const Vec& state) {
        const ClosedLoopState st = unpack_state(state, n, m, cfg.mode);
        log.times.push_back(t);
        log.x.push_back(st.x);
        log.x_m.push_back(st.x_m);
        log.e.push_back(st.error());
        log.u.push_back(rhs.control(t, state));
        log.d.push_back(rhs.disturbance());
        log.k.push_back(st.k);
        if (cfg.mode == AdaptMode::Sliding) {
            Vec sv = sliding_surface(st, *scfg);
            log.s_norm.push_back(sv.norm());
            log.v_err.push_back(0.5 * sv.dot(scfg->p_s * sv));
            log.s.push_back(std::move(sv));
        } else {
            const Vec ev = st.error();
            log.v_err.push_back(0.5 * ev.dot(ref.p * ev));
        }
    };

    // Segment boundaries: weight-schedule events force an integrator
    // sample exactly at each event time.
    std::vector<double> bounds{0.0};
    if (plant.schedule)
        for (double te : plant.schedule->event_times_in(0.0, opt.t_end))
            bounds.push_back(te);
    bounds.push_back(opt.t_end);

    const double hold = dist.hold;
    std::size_t hold_idx = 0;
    rhs.set_disturbance(dist.at_index(0));
    log_sample(0.0, y);

    Vec k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), work(y.size());
    const OdeSystem sys{static_cast<int>(y.size()),
                        [&rhs](double t, const Vec& yy, Vec& dy) { rhs(t, yy, dy); }};

    std::size_t global_step = 0;
    for (std::size_t seg = 0; seg + 1 < bounds.size(); ++seg) {
        const double sa = bounds[seg];
        const double sb = bounds[seg + 1];
        rhs.set_segment(sa);
        double t = sa;
        std::size_t j = 0;
        while (t < sb) {
            double t_next = sa + static_cast<double>(j + 1) * opt.dt;
            if (!(t_next < sb)) t_next = sb;

            const double tol = 1e-9 * hold + 1e-12 * std::abs(t);
            while (static_cast<double>(hold_idx + 1) * hold <= t + tol) ++hold_idx;
            rhs.set_disturbance(dist.at_index(hold_idx));

            rk4_step(sys, t, t_next - t, y, k1, k2, k3, k4, work);
            t = t_next;
            ++j;
            ++global_step;

            if (!y.allFinite()) {
                log.diverged = true;
                log.diverged_time = t;
                return log;
            }
            const bool at_end = seg + 2 == bounds.size() && !(t < sb);
            if (global_step % static_cast<std::size_t>(opt.decimation) == 0 || at_end)
                log_sample(t, y);
        }
    }
    return log;
}

DiagnosticsReport lyapunov_diagnostics(const TrajectoryLog& log,
                                       const ReferenceModel& ref,
                                       const AdaptiveConfig& cfg,
                                       const std::optional<SlidingConfig>& scfg,
                                       const std::optional<Mat>& k_star) {
    DiagnosticsReport rep;
    const std::size_t len = log.size();
    rep.v.resize(len);
    rep.k_tilde_included = k_star.has_value();

    for (std::size_t i = 0; i < len; ++i) {
        double v = log.v_err[i];
        if (k_star) {
            const Mat k_tilde = log.k[i] - *k_star;
            v += 0.5 * (k_tilde.transpose() * cfg.w * k_tilde).trace();
        }
        rep.v[i] = v;
    }

    // Nonuniform 3-point central differences; one-sided at the ends.
    rep.v_dot_fd.assign(len, 0.0);
    if (len >= 2) {
        for (std::size_t i = 1; i + 1 < len; ++i) {
            const double h0 = log.times[i] - log.times[i - 1];
            const double h1 = log.times[i + 1] - log.times[i];
            rep.v_dot_fd[i] = (h0 / (h1 * (h0 + h1))) * rep.v[i + 1] +
                              ((h1 - h0) / (h0 * h1)) * rep.v[i] -
                              (h1 / (h0 * (h0 + h1))) * rep.v[i - 1];
        }
        rep.v_dot_fd[0] = (rep.v[1] - rep.v[0]) / (log.times[1] - log.times[0]);
        rep.v_dot_fd[len - 1] =
            (rep.v[len - 1] - rep.v[len - 2]) / (log.times[len - 1] - log.times[len - 2]);
    }

    if (log.mode == AdaptMode::Plain) {
        rep.v_dot_analytic.resize(len);
        for (std::size_t i = 0; i < len; ++i)
            rep.v_dot_analytic[i] = -0.5 * log.e[i].dot(ref.q * log.e[i]);
    } else {
        require(scfg.has_value(), "lyapunov_diagnostics: sliding log needs SlidingConfig");
        const Mat pgb = scfg->p_s * scfg->gamma * ref.b;
        rep.reach_lhs.resize(len);
        rep.reach_margin.resize(len);
        rep.outside_layer.resize(len);
        for (std::size_t i = 0; i < len; ++i) {
            const double ns = log.s_norm[i];
            rep.reach_lhs[i] = log.s[i].dot(pgb * log.d[i]) - log.rho * ns;
            rep.reach_margin[i] = rep.reach_lhs[i] + scfg->epsilon * ns;
            rep.outside_layer[i] = ns > scfg->delta ? 1 : 0;
        }
    }
    return rep;
}

}  // namespace netid
