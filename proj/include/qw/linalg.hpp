#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

namespace qw {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;

// Orthonormal basis of the k-dimensional right null space (k smallest singular vectors).
Mat smallest_right_singular(const Mat& A, int k);
// Orthonormal basis of the numerical null space, rank decided by sigma <= tol * max(1, sigma_max).
Mat null_space(const Mat& A, double tol);
// Orthonormal basis of the column space.
Mat column_basis(const Mat& A, double tol);

// Greedy single-linkage clustering: a value joins a cluster if within tol of any member.
std::vector<std::vector<int>> greedy_cluster(const std::vector<cplx>& values, double tol);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Worker count from QW_THREADS, capped by hardware concurrency.
int worker_count();
// Runs fn(i) for i in [0,n) across worker_count() threads.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace qw
