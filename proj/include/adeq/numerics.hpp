#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace adeq {

/// Vector field callback: writes dx/dt for the given state and time.
using VectorField =
    std::function<void(const std::vector<double>&, std::vector<double>&, double)>;

struct IntegratorOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  double blowup = 1e12;
};

/// Solution sampled on the uniform grid 0, dt, 2*dt, ..., tau (the last gap
/// may be shorter when dt does not divide tau). Stores states and field
/// values at the grid points; at() interpolates with a cubic Hermite patch.
class Trajectory {
public:
  Trajectory(std::vector<double> times, std::vector<Eigen::VectorXd> states,
             std::vector<Eigen::VectorXd> derivs);

  std::size_t points() const { return times_.size(); }
  std::size_t dim() const { return states_.front().size(); }
  double time(std::size_t i) const { return times_.at(i); }
  double grid_dt() const { return times_[1] - times_[0]; }
  const std::vector<double>& times() const { return times_; }
  const Eigen::VectorXd& state(std::size_t i) const { return states_.at(i); }
  const Eigen::VectorXd& deriv(std::size_t i) const { return derivs_.at(i); }

  void at(double t, Eigen::VectorXd& out) const;
  Eigen::VectorXd at(double t) const;

private:
  std::vector<double> times_;
  std::vector<Eigen::VectorXd> states_;
  std::vector<Eigen::VectorXd> derivs_;
};

/// Adaptive Runge-Kutta (Dormand-Prince 4/5 with dense output) from t=0 to
/// tau, sampled every dt. Throws when the state leaves the finite range
/// [-blowup, blowup], citing the time of divergence.
Trajectory integrate(const VectorField& field, const std::vector<double>& x0,
                     double tau, double dt, const IntegratorOptions& opts = {});

double inf_norm(const Eigen::MatrixXd& m);
double inf_norm(const Eigen::VectorXd& v);

struct InverseResult {
  Eigen::MatrixXd inverse;
  double condition;
};

/// LU inversion with an infinity-norm condition estimate. Throws when the
/// estimate exceeds 1e12 or the factorization degenerates.
InverseResult invert(const Eigen::MatrixXd& m);

/// Orthogonal projection of z0 onto the null space of C: the nearest point
/// to z0 (Euclidean) satisfying C z = 0. Rank-revealing, so redundant and
/// inconsistent-looking duplicate rows are harmless.
Eigen::VectorXd project_to_nullspace(const Eigen::MatrixXd& C, const Eigen::VectorXd& z0);

}  // namespace adeq
