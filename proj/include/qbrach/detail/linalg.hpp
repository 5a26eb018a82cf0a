#pragma once

#include <string>
#include <vector>

#include <complex>

#include <Eigen/Dense>

namespace qbrach::detail {

/// Orthonormal basis (columns) of the null space of `a`, with rank decided
/// by singular values above rel_tol * max(1, sigma_max).
Eigen::MatrixXd null_space(const Eigen::MatrixXd& a, double rel_tol = 1e-9);

/// Orthonormal basis (columns) of the range of `a`.
Eigen::MatrixXd range_space(const Eigen::MatrixXd& a, double rel_tol = 1e-9);

int numeric_rank(const Eigen::MatrixXd& a, double rel_tol = 1e-9);

/// Reduced row echelon form with partial pivoting; near-zero rows dropped.
Eigen::MatrixXd rref(const Eigen::MatrixXd& a, double tol = 1e-9);

/// Renders rows of an RREF system sum_j a_ij x_j = 0 as "x1+x6=0" style
/// strings, with short decimal coefficients where they are not +-1.
std::vector<std::string> format_linear_equalities(const Eigen::MatrixXd& rows,
                                                  const std::vector<std::string>& names,
                                                  double tol = 1e-9);

std::string format_number(double v);

/// exp(-i s H) for a Hermitian matrix H (closed form for 2 x 2).
Eigen::MatrixXcd expm_hermitian(const Eigen::MatrixXcd& h, double s);

/// -i(AB - BA).
Eigen::MatrixXcd commutator_raw(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// (1/2) Re tr[AB] for Hermitian B.
double inner_raw(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

}  // namespace qbrach::detail
