#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "netid/linalg.hpp"
#include "netid/ode.hpp"
#include "netid/rng.hpp"

#include <cmath>
#include <numbers>

using namespace netid;

namespace {

OdeSystem scalar_decay() {
    return {1, [](double, const Vec& y, Vec& dy) { dy(0) = -y(0); }};
}

double endpoint_error(double lambda, double dt) {
    OdeSystem sys{1, [lambda](double, const Vec& y, Vec& dy) { dy(0) = lambda * y(0); }};
    Vec x0(1);
    x0 << 1.0;
    const auto traj = rk4_integrate(sys, x0, 0.0, 1.0, dt);
    return std::abs(traj.states.back()(0) - std::exp(lambda));
}

}  // namespace

TEST_CASE("rk4 matches the closed form of scalar exponential decay") {
    Vec x0(1);
    x0 << 1.0;
    const auto traj = rk4_integrate(scalar_decay(), x0, 0.0, 1.0, 0.01);
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times.back() == 1.0);
    CHECK(std::abs(traj.states.back()(0) - std::exp(-1.0)) < 1e-8);
}

TEST_CASE("rk4 keeps a constant trajectory constant") {
    OdeSystem sys{2, [](double, const Vec&, Vec& dy) { dy.setZero(); }};
    Vec x0(2);
    x0 << 3.5, -2.25;
    const auto traj = rk4_integrate(sys, x0, 0.0, 2.0, 0.1);
    for (const auto& s : traj.states) CHECK(s == x0);
}

TEST_CASE("rk4 closes a full rotation") {
    OdeSystem sys{2, [](double, const Vec& y, Vec& dy) {
                      dy(0) = -y(1);
                      dy(1) = y(0);
                  }};
    Vec x0(2);
    x0 << 1.0, 0.0;
    const auto traj = rk4_integrate(sys, x0, 0.0, 2.0 * std::numbers::pi, 1e-3);
    CHECK((traj.states.back() - x0).norm() < 1e-6);
    // times strictly increasing, final partial step lands on t1
    for (std::size_t i = 1; i < traj.times.size(); ++i)
        CHECK(traj.times[i] > traj.times[i - 1]);
    CHECK(traj.times.back() == 2.0 * std::numbers::pi);
}

TEST_CASE("rk4 exhibits 4th-order convergence on the linear problem") {
    // halving dt must shrink the endpoint error by 8x..32x (nominal 16x)
    const double e1 = endpoint_error(-1.0, 0.02);
    const double e2 = endpoint_error(-1.0, 0.01);
    const double ratio = e1 / e2;
    CHECK(ratio >= 8.0);
    CHECK(ratio <= 32.0);
}

TEST_CASE("rk4 reports divergence with the offending time") {
    OdeSystem sys{1, [](double, const Vec& y, Vec& dy) { dy(0) = y(0) * y(0); }};
    Vec x0(1);
    x0 << 1.0;  // finite-time blowup at t = 1
    CHECK_THROWS_AS(rk4_integrate(sys, x0, 0.0, 2.0, 0.01), DivergedError);
    try {
        rk4_integrate(sys, x0, 0.0, 2.0, 0.01);
    } catch (const DivergedError& err) {
        CHECK(err.time > 0.9);
        CHECK(err.time <= 2.0);
    }
}

TEST_CASE("rk4 rejects bad arguments") {
    Vec x0(1);
    x0 << 1.0;
    CHECK_THROWS_AS(rk4_integrate(scalar_decay(), x0, 0.0, 1.0, 0.0), ArgumentError);
    CHECK_THROWS_AS(rk4_integrate(scalar_decay(), x0, 1.0, 1.0, 0.1), ArgumentError);
    Vec bad(2);
    bad << 1.0, 2.0;
    CHECK_THROWS_AS(rk4_integrate(scalar_decay(), bad, 0.0, 1.0, 0.1), ArgumentError);
}

TEST_CASE("lyapunov solve reproduces the diagonal case") {
    const Mat a_cl = -Mat::Identity(5, 5);
    const Mat q = 2.0 * Mat::Identity(5, 5);
    const Mat p = solve_lyapunov(a_cl, q);
    CHECK((p - Mat::Identity(5, 5)).norm() < 1e-12);
}

TEST_CASE("lyapunov residual vanishes when substituted back") {
    Mat a_cl(2, 2);
    a_cl << -1.0, 1.0, 0.0, -2.0;
    const Mat q = Mat::Identity(2, 2);
    const Mat p = solve_lyapunov(a_cl, q);
    // oracle: plug the solution back into the equation
    CHECK((a_cl.transpose() * p + p * a_cl + q).norm() < 1e-10);
    CHECK(min_eig_symmetric(p) > 0.0);
}

TEST_CASE("lyapunov solve rejects a non-Hurwitz matrix") {
    Mat rot(2, 2);
    rot << 0.0, 1.0, -1.0, 0.0;  // eigenvalues on the imaginary axis
    CHECK_THROWS_AS(solve_lyapunov(rot, Mat::Identity(2, 2)), DesignError);
}

TEST_CASE("lyapunov residual stays tight over random Hurwitz instances") {
    RngStream rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform(0.0, 6.0));
        Mat a(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
        // shift the diagonal below the Gershgorin radius -> Hurwitz by construction
        for (int i = 0; i < n; ++i) {
            double radius = 0.0;
            for (int j = 0; j < n; ++j)
                if (j != i) radius += std::abs(a(i, j));
            a(i, i) = -radius - 0.5 - rng.uniform(0.0, 1.0);
        }
        REQUIRE(is_hurwitz(a));
        const Mat q = Mat::Identity(n, n);
        const Mat p = solve_lyapunov(a, q);
        CHECK((a.transpose() * p + p * a + q).norm() <= 1e-10 * q.norm());
        CHECK(min_eig_symmetric(p) > 0.0);
    }
}

TEST_CASE("hurwitz check on the spec'd cases") {
    CHECK(is_hurwitz(-Mat::Identity(5, 5)));
    Mat rot(2, 2);
    rot << 0.0, 1.0, -1.0, 0.0;
    CHECK_FALSE(is_hurwitz(rot));

    // oracle: strict diagonal dominance with negative diagonal (Gershgorin)
    RngStream rng(7);
    Mat a(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) a(i, j) = rng.uniform(0.0, 1.0);
    for (int i = 0; i < 5; ++i) {
        double radius = 0.0;
        for (int j = 0; j < 5; ++j)
            if (j != i) radius += std::abs(a(i, j));
        a(i, i) = -radius - 1.0;
    }
    CHECK(is_hurwitz(a));
}

TEST_CASE("windowed gramian of the harmonic bank hits pi/w0") {
    const double w0 = 1.0;
    const int n = 5;
    const double period = 2.0 * std::numbers::pi / w0;
    const double dt = 1e-3 * period;

    std::vector<double> times;
    std::vector<Vec> states;
    const int steps = static_cast<int>(std::ceil(period / dt)) + 1;
    for (int k = 0; k <= steps; ++k) {
        const double t = k * dt;
        Vec x(n);
        for (int i = 0; i < n; ++i) x(i) = std::sin((i + 1) * w0 * t);
        times.push_back(t);
        states.push_back(x);
    }
    const Mat g = gramian(times, states, 0.0, period);
    const double alpha = std::numbers::pi / w0;
    CHECK(std::abs(min_eig_symmetric(g) - alpha) < 0.01 * alpha);
}

TEST_CASE("gramian of a constant trajectory is T c c'") {
    Vec c(3);
    c << 1.0, -2.0, 0.5;
    std::vector<double> times;
    std::vector<Vec> states;
    for (int k = 0; k <= 100; ++k) {
        times.push_back(0.01 * k);
        states.push_back(c);
    }
    const Mat g = gramian(times, states, 0.0, 1.0);
    CHECK((g - c * c.transpose()).norm() < 1e-12);
    CHECK(Eigen::FullPivLU<Mat>(g).rank() == 1);
}

TEST_CASE("gramian of synchronized components is singular") {
    std::vector<double> times;
    std::vector<Vec> states;
    for (int k = 0; k <= 200; ++k) {
        const double t = 0.01 * k;
        Vec x(3);
        x.setConstant(std::sin(t));  // x1 = x2 = x3
        times.push_back(t);
        states.push_back(x);
    }
    const Mat g = gramian(times, states, 0.0, 2.0);
    CHECK(min_eig_symmetric(g) < 1e-12);
}

TEST_CASE("gramian is bitwise symmetric and PSD") {
    RngStream rng(11);
    std::vector<double> times;
    std::vector<Vec> states;
    for (int k = 0; k <= 500; ++k) {
        times.push_back(0.01 * k);
        Vec x(4);
        for (int i = 0; i < 4; ++i) x(i) = rng.gauss(0.0, 1.0);
        states.push_back(x);
    }
    const Mat g = gramian(times, states, 0.3, 4.7);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(g(i, j) == g(j, i));
    CHECK(min_eig_symmetric(g) >= -1e-12);
}

TEST_CASE("gramian rejects an empty or underpopulated window") {
    std::vector<double> times{0.0, 1.0};
    std::vector<Vec> states{Vec::Ones(2), Vec::Ones(2)};
    CHECK_THROWS_AS(gramian(times, states, 0.5, 0.5), ArgumentError);
    CHECK_THROWS_AS(gramian(times, states, 0.25, 0.75), ArgumentError);
    CHECK_THROWS_AS(gramian(times, states, 0.0, 2.0), ArgumentError);
}

TEST_CASE("rng streams with equal seeds are identical") {
    RngStream a(123456789), b(123456789);
    for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("rng uniform sample mean obeys the law of large numbers") {
    RngStream rng(2024);
    double sum = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) sum += rng.uniform(0.0, 1.0);
    CHECK(std::abs(sum / draws - 0.5) < 0.01);
}

TEST_CASE("rng gauss with zero std is exactly the mean") {
    RngStream rng(5);
    CHECK(rng.gauss(0.0, 0.0) == 0.0);
    CHECK(rng.gauss(1.5, 0.0) == 1.5);
}

TEST_CASE("rng gauss sample moments are sane") {
    RngStream rng(99);
    double sum = 0.0, sq = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
        const double z = rng.gauss(0.0, 1.0);
        sum += z;
        sq += z * z;
    }
    CHECK(std::abs(sum / draws) < 0.02);
    CHECK(std::abs(sq / draws - 1.0) < 0.03);
}

TEST_CASE("rng split produces decorrelated deterministic children") {
    RngStream base(77);
    RngStream c0 = base.split(0);
    RngStream c1 = base.split(1);
    RngStream c0_again = RngStream(77).split(0);
    CHECK(c0.next_u64() == c0_again.next_u64());
    // different children disagree immediately (overwhelmingly likely by design)
    RngStream a = base.split(2), b = base.split(3);
    CHECK(a.next_u64() != b.next_u64());
}

TEST_CASE("rng rejects inverted uniform bounds") {
    RngStream rng(1);
    CHECK_THROWS_AS(rng.uniform(2.0, 1.0), ArgumentError);
    CHECK_THROWS_AS(rng.gauss(0.0, -1.0), ArgumentError);
}
