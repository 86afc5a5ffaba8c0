#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adeq/model.hpp"
#include "adeq/numerics.hpp"

namespace adeq {

using PolyMatrix = std::vector<std::vector<Polynomial>>;

/// Field of the extended system over ids 0..n_total-1; parameter
/// coordinates are frozen (zero derivative).
VectorField extended_field(const ExtendedPIVP& e);

/// Integrates the extended system from the given assignment.
Trajectory reference_trajectory(const ExtendedPIVP& e, std::span<const double> sigma,
                                double tau, double dt,
                                const IntegratorOptions& opts = {});

/// Symbolic Jacobian of the extended field, n_total x n_total; parameter
/// rows are zero.
PolyMatrix jacobian(const ExtendedPIVP& e);

/// Fundamental matrices of the variational equation y' = A(x(t)) y along the
/// trajectory, one per grid point: result[i] maps y(0) to y(t_i). Column c
/// comes from one integration started at the unit vector e_c.
std::vector<Eigen::MatrixXd> fundamental_matrices(const PolyMatrix& a,
                                                  const Trajectory& traj,
                                                  const IntegratorOptions& opts = {},
                                                  int threads = 0);

struct NormBounds {
  double C;  // box bound on the trajectory, inflated by the safety factor
  double L;  // grid maximum of ||A(x(t_i))|| along the trajectory
};

NormBounds jacobian_norm_bounds(const PolyMatrix& a, const Trajectory& traj,
                                double safety);

struct LambdaBounds {
  double lambda0_plus;  // grid maximum of ||F(0, t_i)||
  double lambda1_plus;  // grid maximum of ||F(t_i, t_j)||, i <= j
  double lambda0;       // lambda0_plus inflated to cover between grid points
  double lambda1;
  double max_condition;
};

LambdaBounds lambda_bounds(const std::vector<Eigen::MatrixXd>& fm, double L, double dt,
                           int threads = 0);

enum class RemainderMethod { Auto, Generic, Hessian };

RemainderMethod parse_remainder_method(std::string_view s);

/// Coefficients d_k bounding the degree-k part of the Taylor remainder of
/// the field around the trajectory, for 2 <= k <= degree. Empty when the
/// field is affine. Generic counts monomials; Hessian sharpens d_2 from the
/// second derivatives (needs the trajectory unless the degree is exactly 2).
std::map<unsigned, double> remainder_coefficients(const ExtendedPIVP& e, double box_c,
                                                  RemainderMethod method,
                                                  const Trajectory* traj);

/// Largest delta whose remainder series stays within the contraction
/// budget: sum_k d_k (2 lambda0 delta)^(k-1) <= 1 / (2 lambda1 tau).
/// Infinite when every d_k vanishes. Closed form through degree 3.
double delta_from_constraint(double lambda0, double lambda1, double tau,
                             const std::map<unsigned, double>& dk);

/// Same bound by monotone bisection; the two agree to ~1e-10 relative.
double delta_by_bisection(double lambda0, double lambda1, double tau,
                          const std::map<unsigned, double>& dk);

struct CertifyOptions {
  double tau = 7.0;
  double dt = 0.023;
  double safety = 1.01;
  RemainderMethod method = RemainderMethod::Auto;
  IntegratorOptions integrator;
  int threads = 0;
};

struct Certificate {
  double tau = 0.0;
  double dt = 0.0;
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double L = 0.0;
  double C = 0.0;
  std::map<unsigned, double> dk;
  double lambda = 0.0;
  double delta = 0.0;
  double distance_inf = 0.0;
  double distance_2 = 0.0;
  bool verdict = false;
  std::vector<std::string> warnings;

  double lambda0_plus = 0.0;
  double lambda1_plus = 0.0;
  double max_condition = 0.0;
  unsigned degree = 0;
  std::string method;
  std::map<std::string, double> timings;
};

/// Full certificate pipeline for a reference assignment sigma_star and the
/// nominal assignment sigma0 it replaces. The verdict states whether the
/// nominal model stays within the certified perturbation radius.
Certificate certify(const ExtendedPIVP& e, std::span<const double> sigma0,
                    std::span<const double> sigma_star, const CertifyOptions& opts = {});

struct ValidationReport {
  int samples = 0;
  double radius = 0.0;
  double lambda = 0.0;
  double max_ratio = 0.0;
  bool pass = false;
  std::optional<double> witness_ratio;
};

/// Empirical soundness check: perturbs sigma_star by random vectors from
/// the infinity-ball of the certified radius (plus both extreme sign
/// vectors), integrates, and compares each amplification ratio against
/// lambda. For affine fields also drives a worst-case witness aimed at the
/// grid maximum.
ValidationReport validate_monte_carlo(const ExtendedPIVP& e,
                                      std::span<const double> sigma_star,
                                      const Certificate& cert, int samples,
                                      std::uint64_t seed,
                                      const CertifyOptions& opts = {});

}  // namespace adeq
