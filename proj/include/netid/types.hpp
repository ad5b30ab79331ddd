#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace netid {

// Dense double-precision linear algebra. Everything in this toolkit is
// desk-scale (N <= 20), so dynamic-size Eigen types are used throughout.
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bad argument or violated precondition.
struct ArgumentError : Error {
    using Error::Error;
};

/// A requested design is infeasible (e.g. closed loop not Hurwitz).
struct DesignError : Error {
    using Error::Error;
};

/// A numerical routine failed (singular system, eigensolver breakdown).
struct NumericalError : Error {
    using Error::Error;
};

/// Integration produced a non-finite state.
struct DivergedError : Error {
    double time;
    explicit DivergedError(double t)
        : Error("integration diverged at t=" + std::to_string(t)), time(t) {}
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw ArgumentError(msg);
}

inline void require_finite(const Mat& m, const std::string& what) {
    if (!m.allFinite()) throw ArgumentError(what + " contains non-finite entries");
}

inline void require_finite(const Vec& v, const std::string& what) {
    if (!v.allFinite()) throw ArgumentError(what + " contains non-finite entries");
}

}  // namespace netid
