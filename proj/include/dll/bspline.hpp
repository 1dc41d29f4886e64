#pragma once

#include <Eigen/Dense>

#include <vector>

namespace dll {

enum class KnotPlacement { quantile, uniform };

/// Clamped B-spline basis on [0, 1].
struct BasisSpec {
    int degree = 3;
    std::vector<double> interior;  // sorted, strictly inside (0, 1)

    int num_interior_knots() const { return static_cast<int>(interior.size()); }
    int size() const { return num_interior_knots() + degree + 1; }

    /// Full knot vector with degree + 1 copies of each boundary.
    std::vector<double> knots() const;

    static BasisSpec uniform(int degree, int num_interior);
    /// Interior knots at the k/(K+1) sample quantiles of z; duplicates and
    /// knots on the boundary are dropped.
    static BasisSpec quantile(int degree, int num_interior, const Eigen::VectorXd& z);
};

/// Values of every basis function at z in [0, 1].
Eigen::VectorXd bspline_basis(double z, const BasisSpec& spec);

/// Row i holds bspline_basis(z[i]).
Eigen::MatrixXd bspline_design(const Eigen::VectorXd& z, const BasisSpec& spec);

/// Omega with beta' Omega beta = int_0^1 (g^(m))^2 for g = sum beta_k B_k.
Eigen::MatrixXd sobolev_penalty_matrix(const BasisSpec& spec, int m);

/// Nonzero basis values for an arbitrary clamped knot vector: fills `values`
/// with degree + 1 entries and returns the index of the first one.
int bspline_nonzero(double z, const std::vector<double>& knots, int degree, double* values);

}  // namespace dll
