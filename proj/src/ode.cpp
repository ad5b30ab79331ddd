#include "netid/ode.hpp"

#include <cmath>

namespace netid {

void rk4_step(const OdeSystem& sys, double t, double h, Vec& y,
              Vec& k1, Vec& k2, Vec& k3, Vec& k4, Vec& work) {
    const double half = 0.5 * h;
    sys.rhs(t, y, k1);
    work = y + half * k1;
    sys.rhs(t + half, work, k2);
    work = y + half * k2;
    sys.rhs(t + half, work, k3);
    work = y + h * k3;
    sys.rhs(t + h, work, k4);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Trajectory rk4_integrate(const OdeSystem& sys, const Vec& x0, double t0,
                         double t1, double dt) {
    require(dt > 0.0, "rk4_integrate: dt must be > 0");
    require(t1 > t0, "rk4_integrate: t1 must be > t0");
    require(x0.size() == sys.state_dim, "rk4_integrate: x0 length != state_dim");
    require_finite(x0, "rk4_integrate: x0");

    const int dim = sys.state_dim;
    Vec y = x0, k1(dim), k2(dim), k3(dim), k4(dim), work(dim);

    Trajectory traj;
    const auto steps = static_cast<std::size_t>(std::ceil((t1 - t0) / dt));
    traj.times.reserve(steps + 1);
    traj.states.reserve(steps + 1);
    traj.times.push_back(t0);
    traj.states.push_back(y);

    double t = t0;
    std::size_t n = 0;
    while (t < t1) {
        double t_next = t0 + static_cast<double>(n + 1) * dt;
        if (!(t_next < t1)) t_next = t1;  // shorten the final step onto t1
        rk4_step(sys, t, t_next - t, y, k1, k2, k3, k4, work);
        t = t_next;
        ++n;
        if (!y.allFinite()) throw DivergedError(t);
        traj.times.push_back(t);
        traj.states.push_back(y);
    }
    return traj;
}

}  // namespace netid
