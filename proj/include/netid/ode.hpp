#pragma once

#include "netid/types.hpp"

#include <functional>
#include <vector>

namespace netid {

/// Autonomous or time-dependent first-order system dy/dt = rhs(t, y).
/// rhs writes its output into the provided buffer (already sized state_dim).
struct OdeSystem {
    int state_dim = 0;
    std::function<void(double t, const Vec& y, Vec& dy)> rhs;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;

    std::size_t size() const { return times.size(); }
};

/// One classic 4th-order Runge-Kutta step of width h, in place.
/// k1..k4 and work are caller-owned scratch buffers of state dimension.
void rk4_step(const OdeSystem& sys, double t, double h, Vec& y,
              Vec& k1, Vec& k2, Vec& k3, Vec& k4, Vec& work);

/// Fixed-step RK4 over [t0, t1]; the last step is shortened so the final
/// sample lands exactly on t1. Every step is recorded, t0 included.
/// Throws DivergedError (carrying the time) if the state goes non-finite.
Trajectory rk4_integrate(const OdeSystem& sys, const Vec& x0, double t0,
                         double t1, double dt);

}  // namespace netid
