#include "netid/linalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace netid {

bool is_hurwitz(const Mat& a) {
    require(a.rows() == a.cols(), "is_hurwitz: matrix must be square");
    require_finite(a, "is_hurwitz: matrix");
    Eigen::EigenSolver<Mat> es(a, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw NumericalError("is_hurwitz: eigensolver failed");
    return (es.eigenvalues().real().array() < -kHurwitzTol).all();
}

Mat solve_lyapunov(const Mat& a_cl, const Mat& q) {
    const auto n = a_cl.rows();
    require(a_cl.cols() == n, "solve_lyapunov: A_cl must be square");
    require(q.rows() == n && q.cols() == n, "solve_lyapunov: Q must match A_cl");
    require(q.isApprox(q.transpose(), 1e-12), "solve_lyapunov: Q must be symmetric");
    if (!is_hurwitz(a_cl)) throw DesignError("solve_lyapunov: A_cl is not Hurwitz");

    // vec(A' P) = (I kron A') vec(P), vec(P A) = (A' kron I) vec(P)
    const Mat at = a_cl.transpose();
    const Mat id = Mat::Identity(n, n);
    Mat sys(n * n, n * n);
    for (Eigen::Index bi = 0; bi < n; ++bi)
        for (Eigen::Index bj = 0; bj < n; ++bj)
            sys.block(bi * n, bj * n, n, n) =
                id(bi, bj) * at + at(bi, bj) * id;

    Vec rhs(n * n);
    for (Eigen::Index j = 0; j < n; ++j) rhs.segment(j * n, n) = -q.col(j);

    Eigen::FullPivLU<Mat> lu(sys);
    if (!lu.isInvertible()) throw NumericalError("solve_lyapunov: singular vectorized system");
    const Vec p_vec = lu.solve(rhs);

    Mat p(n, n);
    for (Eigen::Index j = 0; j < n; ++j) p.col(j) = p_vec.segment(j * n, n);
    p = 0.5 * (p + p.transpose()).eval();

    if (min_eig_symmetric(p) <= 0.0)
        throw NumericalError("solve_lyapunov: result not positive definite");
    return p;
}

Mat gramian(const std::vector<double>& times, const std::vector<Vec>& states,
            double t0, double t1) {
    require(times.size() == states.size(), "gramian: times/states size mismatch");
    require(t1 > t0, "gramian: empty window");
    require(!times.empty() && t0 >= times.front() && t1 <= times.back(),
            "gramian: window outside sampled range");

    const auto lo = std::lower_bound(times.begin(), times.end(), t0);
    auto hi = std::upper_bound(times.begin(), times.end(), t1);
    const auto i0 = static_cast<std::size_t>(lo - times.begin());
    const auto i1 = static_cast<std::size_t>(hi - times.begin());  // one past
    require(i1 - i0 >= 2, "gramian: fewer than 2 samples in window");

    const auto dim = states[i0].size();
    // Trapezoid weights; accumulate the upper triangle only, then mirror,
    // so the output is symmetric bitwise.
    Mat g = Mat::Zero(dim, dim);
    for (std::size_t k = i0; k < i1; ++k) {
        double w = 0.0;
        if (k > i0) w += 0.5 * (times[k] - times[k - 1]);
        if (k + 1 < i1) w += 0.5 * (times[k + 1] - times[k]);
        const Vec& x = states[k];
        for (Eigen::Index i = 0; i < dim; ++i)
            for (Eigen::Index j = i; j < dim; ++j)
                g(i, j) += w * x(i) * x(j);
    }
    for (Eigen::Index i = 0; i < dim; ++i)
        for (Eigen::Index j = 0; j < i; ++j) g(i, j) = g(j, i);
    return g;
}

double min_eig_symmetric(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw NumericalError("min_eig_symmetric: eigensolver failed");
    return es.eigenvalues().minCoeff();
}

double spectral_norm(const Mat& m) {
    return m.jacobiSvd().singularValues()(0);
}

}  // namespace netid
