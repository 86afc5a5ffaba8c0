#include "adeq/bounds.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "adeq/htree.hpp"
#include "adeq/parallel.hpp"

namespace adeq {

namespace {

struct SparseEntry {
  std::size_t row;
  std::size_t col;
  const Polynomial* poly;
};

std::vector<SparseEntry> nonzeros(const PolyMatrix& a) {
  std::vector<SparseEntry> out;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a[i].size(); ++j)
      if (!a[i][j].is_zero()) out.push_back({i, j, &a[i][j]});
  return out;
}

class StageTimer {
public:
  double lap() {
    const auto t = Clock::now();
    const double s = std::chrono::duration<double>(t - last_).count();
    last_ = t;
    return s;
  }

private:
  using Clock = std::chrono::steady_clock;
  Clock::time_point last_ = Clock::now();
};

double series_value(const std::map<unsigned, double>& dk, double lambda0, double delta) {
  double g = 0.0;
  for (const auto& [k, d] : dk) g += d * std::pow(2.0 * lambda0 * delta, k - 1);
  return g;
}

std::map<unsigned, double> positive_orders(const std::map<unsigned, double>& dk) {
  std::map<unsigned, double> out;
  for (const auto& [k, d] : dk) {
    if (k < 2) throw std::invalid_argument("remainder coefficients start at order 2");
    if (!(d >= 0.0) || !std::isfinite(d))
      throw std::invalid_argument("remainder coefficients must be finite and nonnegative");
    if (d > 0.0) out.emplace(k, d);
  }
  return out;
}

void check_lambdas(double lambda0, double lambda1, double tau) {
  if (!(lambda0 > 0.0) || !(lambda1 > 0.0) || !(tau > 0.0))
    throw std::invalid_argument("lambda0, lambda1, and tau must be positive");
}

double hessian_d2(const ExtendedPIVP& e, const Trajectory* traj) {
  const std::size_t nt = e.n_total();
  double worst = 0.0;
  for (std::size_t i = 0; i < e.n_states(); ++i) {
    std::vector<std::pair<Polynomial, double>> entries;
    bool constant = true;
    const std::vector<VarId> vars = e.rhs_hat[i].variables();
    for (std::size_t a = 0; a < vars.size(); ++a)
      for (std::size_t b = a; b < vars.size(); ++b) {
        Polynomial h = e.rhs_hat[i].derivative(vars[a]).derivative(vars[b]);
        if (h.is_zero()) continue;
        if (h.degree() > 0) constant = false;
        entries.emplace_back(std::move(h), vars[a] == vars[b] ? 1.0 : 2.0);
      }
    if (entries.empty()) continue;
    if (!constant && traj == nullptr)
      throw std::invalid_argument(
          "hessian remainder method needs a trajectory when the degree exceeds 2");
    const auto total_at = [&entries](std::span<const double> x) {
      double s = 0.0;
      for (const auto& [h, weight] : entries) s += weight * std::abs(h.evaluate(x));
      return s;
    };
    if (constant || traj == nullptr) {
      const std::vector<double> origin(nt, 0.0);
      worst = std::max(worst, total_at(origin));
    } else {
      for (std::size_t g = 0; g < traj->points(); ++g) {
        const Eigen::VectorXd& x = traj->state(g);
        worst = std::max(worst, total_at({x.data(), static_cast<std::size_t>(x.size())}));
      }
    }
  }
  return 0.5 * worst;
}

}  // namespace

VectorField extended_field(const ExtendedPIVP& e) {
  const auto rhs = std::make_shared<const std::vector<Polynomial>>(e.rhs_hat);
  const std::size_t nt = e.n_total();
  return [rhs, nt](const std::vector<double>& x, std::vector<double>& dxdt, double) {
    if (x.size() != nt)
      throw std::invalid_argument("extended field: state has wrong dimension");
    for (std::size_t i = 0; i < rhs->size(); ++i) dxdt[i] = (*rhs)[i].evaluate(x);
    for (std::size_t i = rhs->size(); i < nt; ++i) dxdt[i] = 0.0;
  };
}

Trajectory reference_trajectory(const ExtendedPIVP& e, std::span<const double> sigma,
                                double tau, double dt, const IntegratorOptions& opts) {
  if (sigma.size() != e.n_total())
    throw std::invalid_argument("reference_trajectory: sigma has wrong dimension");
  return integrate(extended_field(e), std::vector<double>(sigma.begin(), sigma.end()),
                   tau, dt, opts);
}

PolyMatrix jacobian(const ExtendedPIVP& e) {
  const std::size_t nt = e.n_total();
  PolyMatrix a(nt, std::vector<Polynomial>(nt));
  for (std::size_t i = 0; i < e.n_states(); ++i)
    for (VarId v : e.rhs_hat[i].variables()) a[i][v] = e.rhs_hat[i].derivative(v);
  return a;
}

std::vector<Eigen::MatrixXd> fundamental_matrices(const PolyMatrix& a,
                                                  const Trajectory& traj,
                                                  const IntegratorOptions& opts,
                                                  int threads) {
  const std::size_t n = traj.dim();
  if (a.size() != n) throw std::invalid_argument("fundamental_matrices: dimension mismatch");
  const auto entries = nonzeros(a);
  const std::size_t points = traj.points();
  const double tau = traj.time(points - 1);
  const double dt = traj.grid_dt();

  std::vector<Eigen::MatrixXd> fm(points, Eigen::MatrixXd::Zero(n, n));
  parallel_for(n, threads, [&](std::size_t c) {
    Eigen::VectorXd xbuf(n);
    const VectorField field = [&entries, &traj, &xbuf, n](const std::vector<double>& y,
                                                          std::vector<double>& dydt,
                                                          double t) {
      traj.at(t, xbuf);
      const std::span<const double> x{xbuf.data(), n};
      std::fill(dydt.begin(), dydt.end(), 0.0);
      for (const auto& en : entries) dydt[en.row] += en.poly->evaluate(x) * y[en.col];
    };
    std::vector<double> y0(n, 0.0);
    y0[c] = 1.0;
    const Trajectory column = integrate(field, y0, tau, dt, opts);
    if (column.points() != points)
      throw std::logic_error("fundamental_matrices: grid mismatch");
    for (std::size_t i = 0; i < points; ++i) fm[i].col(c) = column.state(i);
  });
  return fm;
}

NormBounds jacobian_norm_bounds(const PolyMatrix& a, const Trajectory& traj,
                                double safety) {
  if (!(safety >= 1.0)) throw std::invalid_argument("safety factor must be at least 1");
  double box = 0.0;
  for (std::size_t i = 0; i < traj.points(); ++i)
    box = std::max(box, inf_norm(traj.state(i)));
  const double c = safety * box;

  const auto entries = nonzeros(a);
  std::vector<double> row_sum(a.size());
  double l = 0.0;
  for (std::size_t i = 0; i < traj.points(); ++i) {
    const Eigen::VectorXd& x = traj.state(i);
    const std::span<const double> point{x.data(), static_cast<std::size_t>(x.size())};
    std::fill(row_sum.begin(), row_sum.end(), 0.0);
    for (const auto& en : entries) row_sum[en.row] += std::abs(en.poly->evaluate(point));
    for (double s : row_sum) l = std::max(l, s);
  }
  return {c, l};
}

LambdaBounds lambda_bounds(const std::vector<Eigen::MatrixXd>& fm, double L, double dt,
                           int threads) {
  if (fm.empty()) throw std::invalid_argument("lambda_bounds: no fundamental matrices");
  if (!(L >= 0.0) || !(dt > 0.0))
    throw std::invalid_argument("lambda_bounds: bad L or dt");
  const std::size_t points = fm.size();
  const Eigen::Index n = fm.front().rows();

  double l0p = 0.0;
  for (const auto& m : fm) l0p = std::max(l0p, inf_norm(m));

  std::vector<Eigen::MatrixXd> inv(points);
  std::vector<double> conds(points);
  parallel_for(points, threads, [&](std::size_t i) {
    InverseResult r = invert(fm[i]);
    inv[i] = std::move(r.inverse);
    conds[i] = r.condition;
  });

  std::vector<double> row_best(points, 1.0);
  parallel_for(points, threads, [&](std::size_t i) {
    Eigen::MatrixXd prod(n, n);
    double best = 1.0;
    for (std::size_t j = i + 1; j < points; ++j) {
      prod.noalias() = fm[j] * inv[i];
      best = std::max(best, inf_norm(prod));
    }
    row_best[i] = best;
  });

  LambdaBounds out;
  out.lambda0_plus = l0p;
  out.lambda1_plus = *std::max_element(row_best.begin(), row_best.end());
  out.max_condition = *std::max_element(conds.begin(), conds.end());
  const double grow = std::exp(L * dt);
  out.lambda0 = out.lambda0_plus * grow;
  out.lambda1 = out.lambda1_plus * (1.0 + L * dt * (grow + 1.0));
  return out;
}

RemainderMethod parse_remainder_method(std::string_view s) {
  if (s == "auto") return RemainderMethod::Auto;
  if (s == "generic") return RemainderMethod::Generic;
  if (s == "hessian") return RemainderMethod::Hessian;
  throw std::invalid_argument("unknown remainder method '" + std::string(s) + "'");
}

std::map<unsigned, double> remainder_coefficients(const ExtendedPIVP& e, double box_c,
                                                  RemainderMethod method,
                                                  const Trajectory* traj) {
  const unsigned deg = e.degree();
  std::map<unsigned, double> dk;
  if (deg <= 1) return dk;
  if (!(box_c >= 0.0)) throw std::invalid_argument("box bound must be nonnegative");
  if (method == RemainderMethod::Auto)
    method = deg <= 2 ? RemainderMethod::Hessian : RemainderMethod::Generic;

  double monomials = 0.0;
  double largest = 0.0;
  for (const auto& q : e.rhs_hat) {
    std::map<unsigned, unsigned> counts;
    for (const auto& [mono, c] : q.terms()) {
      largest = std::max(largest, std::abs(c));
      if (mono.degree() >= 2) ++counts[mono.degree()];
    }
    for (const auto& [k, count] : counts)
      monomials = std::max(monomials, static_cast<double>(count));
  }
  for (unsigned k = 2; k <= deg; ++k)
    dk[k] = std::pow(box_c, static_cast<int>(deg - k)) * monomials * largest;

  if (method == RemainderMethod::Hessian) dk[2] = hessian_d2(e, traj);

  for (auto it = dk.begin(); it != dk.end();)
    it = it->second == 0.0 ? dk.erase(it) : std::next(it);
  return dk;
}

double delta_by_bisection(double lambda0, double lambda1, double tau,
                          const std::map<unsigned, double>& dk_in) {
  check_lambdas(lambda0, lambda1, tau);
  const auto dk = positive_orders(dk_in);
  if (dk.empty()) return std::numeric_limits<double>::infinity();
  const double budget = 1.0 / (2.0 * lambda1 * tau);
  double lo = 0.0, hi = 1.0;
  while (series_value(dk, lambda0, hi) <= budget) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) return std::numeric_limits<double>::infinity();
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (series_value(dk, lambda0, mid) <= budget ? lo : hi) = mid;
  }
  return lo;
}

double delta_from_constraint(double lambda0, double lambda1, double tau,
                             const std::map<unsigned, double>& dk_in) {
  check_lambdas(lambda0, lambda1, tau);
  const auto dk = positive_orders(dk_in);
  if (dk.empty()) return std::numeric_limits<double>::infinity();

  double delta;
  if (dk.rbegin()->first <= 3) {
    const double d2 = dk.count(2) ? dk.at(2) : 0.0;
    const double d3 = dk.count(3) ? dk.at(3) : 0.0;
    const double root = std::sqrt(d2 * d2 + 2.0 * d3 / (lambda1 * tau));
    delta = 1.0 / (2.0 * tau * lambda0 * lambda1 * (d2 + root));
  } else {
    delta = delta_by_bisection(lambda0, lambda1, tau, dk);
  }

  const double budget = 1.0 / (2.0 * lambda1 * tau);
  while (delta > 0.0 && series_value(dk, lambda0, delta) > budget)
    delta = std::nextafter(delta, 0.0);
  return delta;
}

Certificate certify(const ExtendedPIVP& e, std::span<const double> sigma0,
                    std::span<const double> sigma_star, const CertifyOptions& opts) {
  if (sigma0.size() != e.n_total() || sigma_star.size() != e.n_total())
    throw std::invalid_argument("certify: assignment has wrong dimension");

  Certificate cert;
  cert.tau = opts.tau;
  cert.dt = opts.dt;
  cert.degree = e.degree();

  StageTimer timer;
  const Trajectory traj =
      reference_trajectory(e, sigma_star, opts.tau, opts.dt, opts.integrator);
  cert.timings["trajectory"] = timer.lap();

  const PolyMatrix a = jacobian(e);
  const std::vector<Eigen::MatrixXd> fm =
      fundamental_matrices(a, traj, opts.integrator, opts.threads);
  cert.timings["fundamental"] = timer.lap();

  const NormBounds nb = jacobian_norm_bounds(a, traj, opts.safety);
  const LambdaBounds lb = lambda_bounds(fm, nb.L, opts.dt, opts.threads);
  cert.timings["lambda"] = timer.lap();

  cert.C = nb.C;
  cert.L = nb.L;
  cert.lambda0_plus = lb.lambda0_plus;
  cert.lambda1_plus = lb.lambda1_plus;
  cert.lambda0 = lb.lambda0;
  cert.lambda1 = lb.lambda1;
  cert.max_condition = lb.max_condition;
  cert.lambda = 2.0 * lb.lambda0;

  RemainderMethod method = opts.method;
  if (method == RemainderMethod::Auto)
    method = cert.degree <= 2 ? RemainderMethod::Hessian : RemainderMethod::Generic;
  cert.method = cert.degree <= 1 ? "none"
                : method == RemainderMethod::Hessian ? "hessian"
                                                     : "generic";
  cert.dk = remainder_coefficients(e, nb.C, method, &traj);
  cert.delta = delta_from_constraint(lb.lambda0, lb.lambda1, opts.tau, cert.dk);
  cert.timings["delta"] = timer.lap();

  double dist_inf = 0.0, dist_sq = 0.0;
  for (std::size_t i = 0; i < sigma0.size(); ++i) {
    const double d = sigma0[i] - sigma_star[i];
    dist_inf = std::max(dist_inf, std::abs(d));
    dist_sq += d * d;
  }
  cert.distance_inf = dist_inf;
  cert.distance_2 = std::sqrt(dist_sq);
  cert.verdict = cert.distance_inf <= cert.delta;

  if (lb.max_condition > 1e10)
    cert.warnings.push_back("fundamental matrices are ill conditioned (estimate " +
                            format_double(lb.max_condition) + ")");

  if (!(cert.lambda0 <= cert.lambda1 * (1.0 + 1e-9)))
    throw std::logic_error("certificate invariant violated: lambda0 > lambda1");
  if (cert.lambda != 2.0 * cert.lambda0)
    throw std::logic_error("certificate invariant violated: lambda != 2*lambda0");
  return cert;
}

ValidationReport validate_monte_carlo(const ExtendedPIVP& e,
                                      std::span<const double> sigma_star,
                                      const Certificate& cert, int samples,
                                      std::uint64_t seed, const CertifyOptions& opts) {
  if (samples < 0) throw std::invalid_argument("validate: samples must be nonnegative");
  if (sigma_star.size() != e.n_total())
    throw std::invalid_argument("validate: assignment has wrong dimension");
  const std::size_t nt = e.n_total();
  const double radius = std::isfinite(cert.delta) ? cert.delta : 1.0;
  if (!(radius > 0.0))
    throw std::invalid_argument("validate: certificate radius is not positive");

  const Trajectory ref =
      reference_trajectory(e, sigma_star, cert.tau, cert.dt, opts.integrator);

  std::vector<std::vector<double>> pulls;
  SplitMix64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    std::vector<double> u(nt);
    for (auto& v : u) v = rng.uniform(-radius, radius);
    pulls.push_back(std::move(u));
  }
  pulls.emplace_back(nt, radius);
  pulls.emplace_back(nt, -radius);

  std::optional<std::size_t> witness_index;
  if (e.degree() <= 1) {
    const std::vector<Eigen::MatrixXd> fm =
        fundamental_matrices(jacobian(e), ref, opts.integrator, opts.threads);
    std::size_t best_i = 0;
    Eigen::Index best_row = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < fm.size(); ++i)
      for (Eigen::Index r = 0; r < fm[i].rows(); ++r) {
        const double s = fm[i].row(r).cwiseAbs().sum();
        if (s > best) {
          best = s;
          best_i = i;
          best_row = r;
        }
      }
    std::vector<double> u(nt);
    for (std::size_t j = 0; j < nt; ++j)
      u[j] = fm[best_i](best_row, static_cast<Eigen::Index>(j)) < 0.0 ? -radius : radius;
    witness_index = pulls.size();
    pulls.push_back(std::move(u));
  }

  std::vector<double> ratios(pulls.size(), 0.0);
  parallel_for(pulls.size(), opts.threads, [&](std::size_t i) {
    const auto& u = pulls[i];
    double unorm = 0.0;
    for (double v : u) unorm = std::max(unorm, std::abs(v));
    if (unorm == 0.0) return;
    std::vector<double> x0(sigma_star.begin(), sigma_star.end());
    for (std::size_t j = 0; j < nt; ++j) x0[j] += u[j];
    const Trajectory sample =
        integrate(extended_field(e), x0, cert.tau, cert.dt, opts.integrator);
    double worst = 0.0;
    for (std::size_t g = 0; g < ref.points(); ++g)
      worst = std::max(worst, inf_norm(Eigen::VectorXd(sample.state(g) - ref.state(g))));
    ratios[i] = worst / unorm;
  });

  ValidationReport report;
  report.samples = samples;
  report.radius = radius;
  report.lambda = cert.lambda;
  report.max_ratio = *std::max_element(ratios.begin(), ratios.end());
  report.pass = report.max_ratio <= cert.lambda + 1e-6;
  if (witness_index) report.witness_ratio = ratios[*witness_index];
  return report;
}

}  // namespace adeq
