#pragma once

#include "netid/types.hpp"

#include <vector>

namespace netid {

// Eigenvalue real parts below -kHurwitzTol count as stable; the margin
// separates genuine marginal cases from rounding noise at desk scale.
inline constexpr double kHurwitzTol = 1e-9;

/// True iff every eigenvalue of the square matrix a has real part < -kHurwitzTol.
bool is_hurwitz(const Mat& a);

/// Solve A_cl' P + P A_cl = -Q for symmetric positive definite P.
/// Kronecker vectorization with a dense direct solve; fine for N <= 20.
/// Throws DesignError if A_cl is not Hurwitz, NumericalError on a singular
/// vectorized system or an indefinite result.
Mat solve_lyapunov(const Mat& a_cl, const Mat& q);

/// Trapezoidal approximation of the windowed Gramian  integral x x' dtau
/// over [t0, t1], using the samples whose times fall inside the window.
/// The accumulation is symmetrized, so the result is bitwise symmetric.
Mat gramian(const std::vector<double>& times, const std::vector<Vec>& states,
            double t0, double t1);

/// Smallest eigenvalue of a symmetric matrix.
double min_eig_symmetric(const Mat& m);

/// Spectral norm (largest singular value).
double spectral_norm(const Mat& m);

}  // namespace netid
