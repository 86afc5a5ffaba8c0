#include "adeq/numerics.hpp"

#include <algorithm>
#include <boost/numeric/odeint/stepper/controlled_runge_kutta.hpp>
#include <boost/numeric/odeint/stepper/dense_output_runge_kutta.hpp>
#include <boost/numeric/odeint/stepper/generation.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta_dopri5.hpp>
#include <cmath>
#include <stdexcept>

#include "adeq/polynomial.hpp"

namespace adeq {

namespace {

using state_type = std::vector<double>;

std::vector<double> make_grid(double tau, double dt) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be positive");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  std::vector<double> grid;
  const double cutoff = tau - 1e-12 * std::max(1.0, tau);
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (t >= cutoff) break;
    grid.push_back(t);
  }
  grid.push_back(tau);
  return grid;
}

void check_finite(const state_type& x, double t, double blowup) {
  for (double v : x)
    if (!std::isfinite(v) || std::abs(v) > blowup)
      throw std::runtime_error("integration diverged near t = " + format_double(t));
}

}  // namespace

Trajectory::Trajectory(std::vector<double> times, std::vector<Eigen::VectorXd> states,
                       std::vector<Eigen::VectorXd> derivs)
    : times_(std::move(times)), states_(std::move(states)), derivs_(std::move(derivs)) {
  if (times_.size() < 2 || times_.size() != states_.size() ||
      times_.size() != derivs_.size())
    throw std::invalid_argument("trajectory: inconsistent sample arrays");
  for (std::size_t i = 1; i < times_.size(); ++i)
    if (!(times_[i] > times_[i - 1]))
      throw std::invalid_argument("trajectory: times must increase strictly");
}

void Trajectory::at(double t, Eigen::VectorXd& out) const {
  t = std::clamp(t, times_.front(), times_.back());
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i = static_cast<std::size_t>(it - times_.begin());
  i = std::min(std::max<std::size_t>(i, 1), times_.size() - 1) - 1;
  const double h = times_[i + 1] - times_[i];
  const double u = (t - times_[i]) / h;
  const double u2 = u * u, u3 = u2 * u;
  const double h00 = 2 * u3 - 3 * u2 + 1;
  const double h10 = u3 - 2 * u2 + u;
  const double h01 = -2 * u3 + 3 * u2;
  const double h11 = u3 - u2;
  out = h00 * states_[i] + (h10 * h) * derivs_[i] + h01 * states_[i + 1] +
        (h11 * h) * derivs_[i + 1];
}

Eigen::VectorXd Trajectory::at(double t) const {
  Eigen::VectorXd out;
  at(t, out);
  return out;
}

Trajectory integrate(const VectorField& field, const std::vector<double>& x0,
                     double tau, double dt, const IntegratorOptions& opts) {
  namespace ode = boost::numeric::odeint;
  const std::vector<double> grid = make_grid(tau, dt);
  const std::size_t n = x0.size();

  const auto system = [&field](const state_type& x, state_type& dxdt, double t) {
    dxdt.resize(x.size());
    field(x, dxdt, t);
  };

  std::vector<double> times;
  std::vector<Eigen::VectorXd> states, derivs;
  times.reserve(grid.size());
  states.reserve(grid.size());
  derivs.reserve(grid.size());

  state_type xi(n), fi(n);
  const auto record = [&](double t, const state_type& x) {
    check_finite(x, t, opts.blowup);
    fi.resize(n);
    field(x, fi, t);
    times.push_back(t);
    states.push_back(Eigen::Map<const Eigen::VectorXd>(x.data(), n));
    derivs.push_back(Eigen::Map<const Eigen::VectorXd>(fi.data(), n));
  };

  record(0.0, x0);

  auto stepper =
      ode::make_dense_output(opts.abs_tol, opts.rel_tol, ode::runge_kutta_dopri5<state_type>());
  stepper.initialize(x0, 0.0, std::min(dt, tau));

  std::size_t gi = 1;
  std::size_t steps = 0;
  while (gi < grid.size()) {
    if (grid[gi] <= stepper.current_time()) {
      stepper.calc_state(grid[gi], xi);
      record(grid[gi], xi);
      ++gi;
      continue;
    }
    if (++steps > 20'000'000)
      throw std::runtime_error("integration exceeded the step limit at t = " +
                               format_double(stepper.current_time()));
    stepper.do_step(system);
    check_finite(stepper.current_state(), stepper.current_time(), opts.blowup);
  }

  return Trajectory(std::move(times), std::move(states), std::move(derivs));
}

double inf_norm(const Eigen::MatrixXd& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

double inf_norm(const Eigen::VectorXd& v) {
  if (v.size() == 0) return 0.0;
  return v.cwiseAbs().maxCoeff();
}

InverseResult invert(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("invert: matrix must be square");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  Eigen::MatrixXd inv = lu.inverse();
  const double cond = inf_norm(m) * inf_norm(inv);
  if (!std::isfinite(cond) || cond > 1e12)
    throw std::runtime_error("matrix numerically singular (condition estimate " +
                             format_double(cond) + ")");
  return {std::move(inv), cond};
}

Eigen::VectorXd project_to_nullspace(const Eigen::MatrixXd& C, const Eigen::VectorXd& z0) {
  if (C.rows() == 0) return z0;
  if (C.cols() != z0.size())
    throw std::invalid_argument("project_to_nullspace: dimension mismatch");
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(C);
  const Eigen::VectorXd w = cod.solve(C * z0);
  return z0 - w;
}

}  // namespace adeq
