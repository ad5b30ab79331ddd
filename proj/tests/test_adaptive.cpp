#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "netid/adaptive.hpp"
#include "netid/linalg.hpp"
#include "netid/network.hpp"
#include "netid/reference.hpp"

#include <cmath>

using namespace netid;

namespace {

struct Setup {
    NetworkSystem plant;
    ReferenceModel ref;
    AdaptiveConfig cfg;
};

Setup five_node(std::uint64_t seed) {
    RngStream rng(seed);
    RngStream net_rng = rng.split(0);
    RngStream ref_rng = rng.split(2);
    Setup s;
    s.plant = gen_random_network(5, net_rng);
    ReferenceDesign d;
    d.signal = pe_sinusoid_bank(5, ref_rng);
    s.ref = design_reference(5, d);
    s.cfg.w = 10.0 * Mat::Identity(5, 5);
    s.cfg.k0 = Mat::Zero(5, 5);
    s.cfg.mode = AdaptMode::Plain;
    return s;
}

}  // namespace

TEST_CASE("matched gain closes the loop for B = I") {
    RngStream rng(2);
    const auto net = gen_random_network(4, rng);
    const Mat a_m = -Mat::Identity(4, 4);
    const auto mg = matched_gain(net.a, a_m, net.b);
    CHECK(mg.feasible);
    CHECK((mg.k - (-Mat::Identity(4, 4) - net.a)).norm() < 1e-12);
    CHECK((net.a + net.b * mg.k - a_m).norm() < 1e-12);
}

TEST_CASE("matched gain of a perfect model is zero") {
    const Mat a = Mat::Random(3, 3);
    const auto mg = matched_gain(a, a, Mat::Identity(3, 3));
    CHECK(mg.feasible);
    CHECK(mg.k.norm() < 1e-12);
}

TEST_CASE("matched gain reports infeasibility outside the range of B") {
    Mat b(2, 1);
    b << 1, 0;
    Mat a = Mat::Zero(2, 2);
    Mat a_m(2, 2);
    a_m << -1, 0, 1, -1;  // second row cannot be produced through B
    const auto mg = matched_gain(a, a_m, b);
    CHECK_FALSE(mg.feasible);
    CHECK(mg.residual > 0.5);
}

TEST_CASE("topology recovery inverts the matched gain when B = I") {
    RngStream rng(5);
    const auto net = gen_random_network(5, rng);
    const Mat a_m = -Mat::Identity(5, 5);
    const auto mg = matched_gain(net.a, a_m, net.b);
    const auto est = recover_topology(mg.k, a_m, net.b);
    CHECK((est.a_hat - net.a).lpNorm<Eigen::Infinity>() <= 1e-12);
    CHECK(est.recoverable_mask.all());
    CHECK(est.residual_norm <= 1e-12);
}

TEST_CASE("topology recovery with zero gain returns the reference matrix") {
    const Mat a_m = -Mat::Identity(3, 3);
    const auto est = recover_topology(Mat::Zero(3, 3), a_m, Mat::Identity(3, 3));
    CHECK(est.a_hat == a_m);
}

TEST_CASE("topology recovery masks undriven rows") {
    Mat b = Mat::Zero(3, 3);
    b(0, 0) = 1.0;
    b(1, 1) = 1.0;  // node 3 undriven
    const auto est = recover_topology(Mat::Zero(3, 3), -Mat::Identity(3, 3), b);
    CHECK(est.recoverable_mask.row(0).all());
    CHECK(est.recoverable_mask.row(1).all());
    CHECK_FALSE(est.recoverable_mask.row(2).any());
}

TEST_CASE("plain rhs freezes the gain when the error is zero") {
    auto s = five_node(1);
    ClosedLoopState st;
    st.x = Vec::Ones(5);
    st.x_m = Vec::Ones(5);
    st.k = Mat::Zero(5, 5);
    const Vec dy = plain_rhs(st, 0.7, s.plant, s.ref, s.cfg);
    // gain block of the derivative is exactly zero: K' is linear in e
    CHECK(dy.segment(10, 25).isZero(0.0));
}

TEST_CASE("plain rhs at the matched equilibrium keeps e and K frozen") {
    auto s = five_node(2);
    const auto mg = matched_gain(s.plant.a, s.ref.a_m, s.plant.b);
    REQUIRE(mg.feasible);
    ClosedLoopState st;
    st.x = Vec::Constant(5, 0.3);
    st.x_m = st.x;
    st.k = mg.k;
    const Vec dy = plain_rhs(st, 1.3, s.plant, s.ref, s.cfg);
    // K' = 0 exactly; the error derivative collapses to rounding noise
    CHECK(dy.segment(10, 25).isZero(0.0));
    CHECK((dy.segment(0, 5) - dy.segment(5, 5)).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("plain rhs matches the hand-computed scalar law") {
    // n = m = 1, A = a, B = 1, A_m = -1, L* = 0, P = 1, W = w
    const double a = 0.4, w = 2.5, r0 = 1.2, freq = 1.7;
    NetworkSystem plant;
    plant.n = 1;
    plant.a = Mat::Constant(1, 1, a);
    plant.b = Mat::Identity(1, 1);

    ReferenceDesign d;
    d.signal.kind = ReferenceSignal::Kind::SinusoidBank;
    d.signal.amplitude = Vec::Constant(1, r0);
    d.signal.frequency = Vec::Constant(1, freq);
    const auto ref = design_reference(1, d);
    REQUIRE(ref.l_star(0, 0) == 0.0);
    REQUIRE(ref.p(0, 0) == doctest::Approx(1.0));

    AdaptiveConfig cfg;
    cfg.w = Mat::Constant(1, 1, w);
    cfg.k0 = Mat::Zero(1, 1);

    ClosedLoopState st;
    st.x = Vec::Constant(1, 0.8);
    st.x_m = Vec::Constant(1, 0.2);
    st.k = Mat::Constant(1, 1, -0.1);

    const double t = 0.33;
    const Vec dy = plain_rhs(st, t, plant, ref, cfg);

    const double x = 0.8, xm = 0.2, k = -0.1;
    const double r = r0 * std::sin(freq * t);
    const double u = k * x + r;
    CHECK(dy(0) == doctest::Approx(a * x + u).epsilon(1e-14));
    CHECK(dy(1) == doctest::Approx(-xm + r).epsilon(1e-14));
    CHECK(dy(2) == doctest::Approx(-(x - xm) * x / w).epsilon(1e-14));
}

TEST_CASE("one closed-loop rk4 step agrees with a hand-rolled scalar update") {
    const double a = 0.4, w = 2.5, r0 = 1.2, freq = 1.7, dt = 1e-3;
    NetworkSystem plant;
    plant.n = 1;
    plant.a = Mat::Constant(1, 1, a);
    plant.b = Mat::Identity(1, 1);

    ReferenceDesign d;
    d.signal.kind = ReferenceSignal::Kind::SinusoidBank;
    d.signal.amplitude = Vec::Constant(1, r0);
    d.signal.frequency = Vec::Constant(1, freq);
    const auto ref = design_reference(1, d);

    AdaptiveConfig cfg;
    cfg.w = Mat::Constant(1, 1, w);
    cfg.k0 = Mat::Zero(1, 1);

    RunOptions opt;
    opt.t_end = dt;
    opt.dt = dt;
    opt.decimation = 1;
    opt.x0 = Vec::Constant(1, 0.8);
    opt.xm0 = Vec::Constant(1, 0.2);
    RngStream rng(0);
    const auto log = run_closed_loop(plant, ref, cfg, std::nullopt, opt, rng);
    REQUIRE(log.size() == 2);

    // independent scalar RK4 on (x, xm, k)
    struct S {
        double x, xm, k;
    };
    const auto f = [&](double t, S s) {
        const double r = r0 * std::sin(freq * t);
        const double u = s.k * s.x + r;
        return S{a * s.x + u, -s.xm + r, -(s.x - s.xm) * s.x / w};
    };
    S y{0.8, 0.2, 0.0};
    const S k1 = f(0.0, y);
    const S k2 = f(dt / 2, {y.x + dt / 2 * k1.x, y.xm + dt / 2 * k1.xm, y.k + dt / 2 * k1.k});
    const S k3 = f(dt / 2, {y.x + dt / 2 * k2.x, y.xm + dt / 2 * k2.xm, y.k + dt / 2 * k2.k});
    const S k4 = f(dt, {y.x + dt * k3.x, y.xm + dt * k3.xm, y.k + dt * k3.k});
    const S next{y.x + dt / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
                 y.xm + dt / 6 * (k1.xm + 2 * k2.xm + 2 * k3.xm + k4.xm),
                 y.k + dt / 6 * (k1.k + 2 * k2.k + 2 * k3.k + k4.k)};

    CHECK(log.x.back()(0) == doctest::Approx(next.x).epsilon(1e-14));
    CHECK(log.x_m.back()(0) == doctest::Approx(next.xm).epsilon(1e-14));
    CHECK(log.k.back()(0, 0) == doctest::Approx(next.k).epsilon(1e-14));
}

TEST_CASE("sliding surface formula") {
    SlidingConfig scfg = default_sliding_config(Mat::Identity(3, 3), 0.1, 1e-3, 0.0);
    ClosedLoopState st;
    st.x = Vec::Constant(3, 1.0);
    st.x_m = Vec::Zero(3);
    st.z = Vec::Zero(3);

    // empty integral at t = 0: s = Gamma e
    CHECK(sliding_surface(st, scfg) == st.error());

    // constant e with A_cl = -I, Gamma = I: z(t) = -t e, so s = (1 + t) e
    const double t = 2.5;
    st.z = -t * st.error();
    CHECK((sliding_surface(st, scfg) - (1.0 + t) * st.error()).norm() < 1e-14);

    // e == 0 with empty integral
    st.x_m = st.x;
    st.z = Vec::Zero(3);
    CHECK(sliding_surface(st, scfg).isZero(0.0));
}

TEST_CASE("sat is continuous at the layer boundary and 1/delta-Lipschitz") {
    const double delta = 0.01;
    Vec s(2);
    s << delta, 0.0;
    // both branches give s/delta at the seam
    CHECK((sat(s, delta) - s / delta).norm() < 1e-15);

    RngStream rng(44);
    for (int trial = 0; trial < 500; ++trial) {
        Vec s1(3), s2(3);
        for (int i = 0; i < 3; ++i) {
            s1(i) = rng.gauss(0.0, 3.0 * delta);
            s2(i) = rng.gauss(0.0, 3.0 * delta);
        }
        const double lhs = (sat(s1, delta) - sat(s2, delta)).norm();
        CHECK(lhs <= (1.0 / delta) * (s1 - s2).norm() + 1e-12);
    }
}

TEST_CASE("sliding rhs matches the hand-computed scalar law outside the layer") {
    // n = m = 1, Gamma = P_s = 1, B = 1, M = 1: u = kx + l*e + r - rho sign(s)
    const double a = -0.3, w = 4.0, rho = 2.0, eps = 0.5, delta = 1e-3;
    NetworkSystem plant;
    plant.n = 1;
    plant.a = Mat::Constant(1, 1, a);
    plant.b = Mat::Identity(1, 1);

    ReferenceDesign d;
    d.signal = ReferenceSignal::step(Vec::Constant(1, 0.7));
    const auto ref = design_reference(1, d);

    AdaptiveConfig cfg;
    cfg.w = Mat::Constant(1, 1, w);
    cfg.k0 = Mat::Zero(1, 1);
    cfg.mode = AdaptMode::Sliding;

    const auto scfg = make_sliding_config_fixed_rho(Mat::Identity(1, 1),
                                                    Mat::Identity(1, 1),
                                                    plant.b, rho, eps, delta);

    ClosedLoopState st;
    st.x = Vec::Constant(1, 1.0);
    st.x_m = Vec::Constant(1, 0.4);
    st.k = Mat::Constant(1, 1, 0.2);
    st.z = Vec::Constant(1, 0.1);

    const Vec dy = sliding_rhs(st, 0.0, plant, ref, cfg, scfg);

    const double x = 1.0, xm = 0.4, k = 0.2, z = 0.1, r = 0.7;
    const double e = x - xm;
    const double s = e - z;  // 0.5, outside the layer
    REQUIRE(std::abs(s) > delta);
    const double u = k * x + r - rho * (s > 0 ? 1.0 : -1.0);
    CHECK(dy(0) == doctest::Approx(a * x + u).epsilon(1e-14));
    CHECK(dy(1) == doctest::Approx(-xm + r).epsilon(1e-14));
    CHECK(dy(2) == doctest::Approx(-s * x / w).epsilon(1e-14));
    CHECK(dy(3) == doctest::Approx(-e).epsilon(1e-14));  // z' = (A_m + BL*) e = -e
}

TEST_CASE("sliding rhs switching term and gain freeze at s = 0") {
    auto sbase = five_node(3);
    sbase.cfg.mode = AdaptMode::Sliding;
    const auto scfg = default_sliding_config(sbase.plant.b, 0.1, 1e-3, 0.0);
    ClosedLoopState st;
    st.x = Vec::Ones(5) * 0.5;
    st.x_m = st.x;
    st.k = Mat::Zero(5, 5);
    st.z = Vec::Zero(5);  // e = 0, z = 0 => s = 0
    const Vec dy = sliding_rhs(st, 0.0, sbase.plant, sbase.ref, sbase.cfg, scfg);
    CHECK(dy.segment(10, 25).isZero(0.0));  // K' = 0: Eq. of adaptation linear in s
}

TEST_CASE("gain derivative scales inversely with the adaptation weight") {
    auto s = five_node(4);
    ClosedLoopState st;
    RngStream rng(10);
    st.x = Vec(5);
    st.x_m = Vec(5);
    for (int i = 0; i < 5; ++i) {
        st.x(i) = rng.gauss(0.0, 1.0);
        st.x_m(i) = rng.gauss(0.0, 1.0);
    }
    st.k = Mat::Zero(5, 5);

    const Vec dy1 = plain_rhs(st, 0.5, s.plant, s.ref, s.cfg);
    auto scaled = s.cfg;
    const double c = 3.7;
    scaled.w = c * s.cfg.w;
    const Vec dy2 = plain_rhs(st, 0.5, s.plant, s.ref, scaled);

    for (int i = 0; i < 25; ++i)
        CHECK(dy2(10 + i) == doctest::Approx(dy1(10 + i) / c).epsilon(1e-12));
}

TEST_CASE("trace identity used by the Lyapunov derivation") {
    RngStream rng(20);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 3 + static_cast<int>(rng.uniform(0.0, 3.0));
        const int m = 2 + static_cast<int>(rng.uniform(0.0, 3.0));
        Mat k_tilde(m, n), b(n, m), p(n, n);
        Vec e(n), x(n);
        for (int i = 0; i < m * n; ++i) k_tilde(i / n, i % n) = rng.gauss(0.0, 1.0);
        for (int i = 0; i < n * m; ++i) b(i / m, i % m) = rng.gauss(0.0, 1.0);
        for (int i = 0; i < n * n; ++i) p(i / n, i % n) = rng.gauss(0.0, 1.0);
        for (int i = 0; i < n; ++i) {
            e(i) = rng.gauss(0.0, 1.0);
            x(i) = rng.gauss(0.0, 1.0);
        }
        const double lhs = x.transpose() * k_tilde.transpose() * b.transpose() * p * e;
        const double rhs = (k_tilde.transpose() * b.transpose() * p * e * x.transpose()).trace();
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("zero network with zero input stays identically zero") {
    NetworkSystem plant;
    plant.n = 3;
    plant.a = Mat::Zero(3, 3);
    plant.b = Mat::Identity(3, 3);
    const auto ref = design_reference(3, {});
    AdaptiveConfig cfg;
    cfg.w = Mat::Identity(3, 3);
    cfg.k0 = Mat::Zero(3, 3);
    RunOptions opt;
    opt.t_end = 5.0;
    opt.x0 = Vec::Zero(3);
    opt.xm0 = Vec::Zero(3);
    RngStream rng(0);
    const auto log = run_closed_loop(plant, ref, cfg, std::nullopt, opt, rng);
    for (std::size_t i = 0; i < log.size(); ++i) {
        CHECK(log.x[i].isZero(0.0));
        CHECK(log.x_m[i].isZero(0.0));
        CHECK(log.k[i].isZero(0.0));
        CHECK(log.u[i].isZero(0.0));
    }
}

TEST_CASE("matched initial gain pins the run to the invariant manifold") {
    auto s = five_node(6);
    const auto mg = matched_gain(s.plant.a, s.ref.a_m, s.plant.b);
    REQUIRE(mg.feasible);
    auto cfg = s.cfg;
    cfg.k0 = mg.k;

    RunOptions opt;
    opt.t_end = 10.0;
    RngStream init(123);
    Vec x0(5);
    for (int i = 0; i < 5; ++i) x0(i) = init.gauss(0.0, 1.0);
    opt.x0 = x0;
    opt.xm0_equals_x0 = true;

    RngStream rng(0);
    const auto log = run_closed_loop(s.plant, s.ref, cfg, std::nullopt, opt, rng);
    double sup_e = 0.0, sup_kdev = 0.0;
    for (std::size_t i = 0; i < log.size(); ++i) {
        sup_e = std::max(sup_e, log.e[i].norm());
        sup_kdev = std::max(sup_kdev, (log.k[i] - mg.k).norm());
    }
    CHECK(sup_e <= 1e-9);
    CHECK(sup_kdev <= 1e-9);
}

TEST_CASE("lyapunov value decreases monotonically on noise-free runs") {
    for (std::uint64_t seed : {11, 12, 13, 14, 15}) {
        auto s = five_node(seed);
        const auto mg = matched_gain(s.plant.a, s.ref.a_m, s.plant.b);
        RunOptions opt;
        opt.t_end = 20.0;
        RngStream x0_rng = RngStream(seed).split(1);
        Vec x0(5);
        for (int i = 0; i < 5; ++i) x0(i) = x0_rng.gauss(0.0, 1.0);
        opt.x0 = x0;

        RngStream rng(0);
        const auto log = run_closed_loop(s.plant, s.ref, s.cfg, std::nullopt, opt, rng);
        const auto diag =
            lyapunov_diagnostics(log, s.ref, s.cfg, std::nullopt, mg.k);
        REQUIRE(diag.k_tilde_included);
        const double slack = 1e-8 * diag.v.front();
        for (std::size_t i = 1; i < diag.v.size(); ++i)
            CHECK(diag.v[i] <= diag.v[i - 1] + slack);
    }
}

TEST_CASE("finite-difference V-dot tracks the analytic rate") {
    auto s = five_node(16);
    const auto mg = matched_gain(s.plant.a, s.ref.a_m, s.plant.b);
    RunOptions opt;
    opt.t_end = 8.0;
    RngStream x0_rng = RngStream(16).split(1);
    Vec x0(5);
    for (int i = 0; i < 5; ++i) x0(i) = x0_rng.gauss(0.0, 1.0);
    opt.x0 = x0;

    RngStream rng(0);
    const auto log = run_closed_loop(s.plant, s.ref, s.cfg, std::nullopt, opt, rng);
    const auto diag = lyapunov_diagnostics(log, s.ref, s.cfg, std::nullopt, mg.k);

    double vmax = 0.0;
    for (double vd : diag.v_dot_analytic) vmax = std::max(vmax, std::abs(vd));
    REQUIRE(vmax > 0.0);
    int checked = 0;
    for (std::size_t i = 1; i + 1 < diag.v.size(); ++i) {
        if (std::abs(diag.v_dot_analytic[i]) < 1e-3 * vmax) continue;
        CHECK(std::abs(diag.v_dot_fd[i] - diag.v_dot_analytic[i]) <=
              0.01 * std::abs(diag.v_dot_analytic[i]));
        ++checked;
    }
    CHECK(checked > 50);
}

TEST_CASE("diagnostics with matched state are identically zero") {
    auto s = five_node(17);
    const auto mg = matched_gain(s.plant.a, s.ref.a_m, s.plant.b);
    auto cfg = s.cfg;
    cfg.k0 = mg.k;
    RunOptions opt;
    opt.t_end = 1.0;
    opt.x0 = Vec::Zero(5);
    opt.xm0 = Vec::Zero(5);
    RngStream rng(0);
    const auto log = run_closed_loop(s.plant, s.ref, cfg, std::nullopt, opt, rng);
    const auto diag = lyapunov_diagnostics(log, s.ref, cfg, std::nullopt, mg.k);
    for (double v : diag.v) CHECK(v <= 1e-18);
}

TEST_CASE("divergence is reported as a partial log, not an exception") {
    // a stiff stable plant: |lambda| dt >> 2.8, so fixed-step RK4 blows up
    NetworkSystem plant;
    plant.n = 1;
    plant.a = Mat::Constant(1, 1, -1e4);
    plant.b = Mat::Identity(1, 1);
    const auto ref = design_reference(1, {});
    AdaptiveConfig cfg;
    cfg.w = Mat::Identity(1, 1);
    cfg.k0 = Mat::Zero(1, 1);
    RunOptions opt;
    opt.t_end = 50.0;
    opt.dt = 1e-3;
    opt.x0 = Vec::Ones(1);
    RngStream rng(0);
    const auto log = run_closed_loop(plant, ref, cfg, std::nullopt, opt, rng);
    CHECK(log.diverged);
    CHECK(log.diverged_time > 0.0);
    CHECK(log.diverged_time < 50.0);
    CHECK(log.size() >= 1);
}

TEST_CASE("sliding run with zero error stays on the surface") {
    auto s = five_node(18);
    s.cfg.mode = AdaptMode::Sliding;
    const auto mg = matched_gain(s.plant.a, s.ref.a_m, s.plant.b);
    auto cfg = s.cfg;
    cfg.k0 = mg.k;
    const auto scfg = default_sliding_config(s.plant.b, 0.1, 1e-3, 0.0);
    RunOptions opt;
    opt.t_end = 5.0;
    RngStream init(55);
    Vec x0(5);
    for (int i = 0; i < 5; ++i) x0(i) = init.gauss(0.0, 1.0);
    opt.x0 = x0;
    opt.xm0_equals_x0 = true;
    RngStream rng(0);
    const auto log = run_closed_loop(s.plant, s.ref, cfg, scfg, opt, rng);
    CHECK_FALSE(log.diverged);
    // s(0) = Gamma e(0) = 0, and e never leaves the manifold appreciably
    CHECK(log.s_norm.front() == 0.0);
    for (double ns : log.s_norm) CHECK(ns <= 1e-6);
}

TEST_CASE("rho auto applies the prescribed margin formula") {
    // P_s = Gamma = B = I: rho = sqrt(m) * d_max + epsilon
    const auto scfg = make_sliding_config(Mat::Identity(4, 4), Mat::Identity(4, 4),
                                          Mat::Identity(4, 4), 0.1, 1e-3, 3.0);
    CHECK(scfg.rho == doctest::Approx(std::sqrt(4.0) * 3.0 + 0.1).epsilon(1e-12));
    CHECK(scfg.m_mat.isApprox(Mat::Identity(4, 4), 1e-12));
}

TEST_CASE("sliding config validation rejects broken inputs") {
    const Mat b = Mat::Identity(3, 3);
    // rank-deficient Gamma
    Mat gamma = Mat::Zero(3, 3);
    gamma(0, 0) = 1.0;
    CHECK_THROWS_AS(make_sliding_config(gamma, Mat::Identity(3, 3), b, 0.1, 1e-3, 1.0),
                    DesignError);
    // indefinite P_s
    CHECK_THROWS_AS(
        make_sliding_config(Mat::Identity(3, 3), -Mat::Identity(3, 3), b, 0.1, 1e-3, 1.0),
        DesignError);
    // bad layer width
    CHECK_THROWS_AS(
        make_sliding_config(Mat::Identity(3, 3), Mat::Identity(3, 3), b, 0.1, 0.0, 1.0),
        ArgumentError);
}

TEST_CASE("adaptive config validation") {
    AdaptiveConfig cfg;
    cfg.w = Mat::Identity(3, 3);
    cfg.k0 = Mat::Zero(3, 3);
    CHECK_NOTHROW(cfg.validate(3, 3));
    cfg.w = -Mat::Identity(3, 3);
    CHECK_THROWS_AS(cfg.validate(3, 3), DesignError);
    cfg.w = Mat::Identity(2, 2);
    CHECK_THROWS_AS(cfg.validate(3, 3), ArgumentError);
}
