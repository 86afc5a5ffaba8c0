#include "adeq/reference.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "adeq/numerics.hpp"

namespace adeq {

namespace {

LinearForm canonical_row(const std::map<VarId, double>& entries) {
  LinearForm f;
  for (const auto& [v, c] : entries)
    if (c != 0.0) f.coeffs.emplace_back(v, c);
  if (!f.coeffs.empty() && f.coeffs.front().second < 0.0)
    for (auto& [v, c] : f.coeffs) c = -c;
  return f;
}

/// Splits a defect polynomial into one linear row per distinct
/// non-parameter monomial shape. Defects built from an extension are linear
/// and homogeneous in the parameters; anything else is rejected.
void collect_rows(const Polynomial& defect, std::size_t n_states, std::size_t n_total,
                  std::set<LinearForm>& rows) {
  std::map<MultiIndex, std::map<VarId, double>> groups;
  for (const auto& [mono, c] : defect.terms()) {
    std::vector<std::pair<VarId, unsigned>> shape;
    VarId param = 0;
    unsigned param_degree = 0;
    for (const auto& [v, e] : mono.entries()) {
      if (v >= n_states && v < n_total) {
        param = v;
        param_degree += e;
      } else {
        shape.emplace_back(v, e);
      }
    }
    if (param_degree != 1)
      throw std::invalid_argument(
          "constraints require right-hand sides linear in the parameters");
    groups[MultiIndex{std::move(shape)}][param] += c;
  }
  for (const auto& [shape, entries] : groups) {
    LinearForm f = canonical_row(entries);
    if (!f.coeffs.empty()) rows.insert(std::move(f));
  }
}

std::map<VarId, Polynomial> representative_map(const Partition& h) {
  std::map<VarId, Polynomial> sub;
  for (const auto& block : h.blocks()) {
    const VarId rep = block.front();
    for (std::size_t i = 1; i < block.size(); ++i)
      sub.emplace(block[i], Polynomial::variable(rep));
  }
  return sub;
}

void check_exact(const PIVP& m, const Partition& h, Mode mode) {
  if (h.size() != m.size())
    throw std::invalid_argument("partition size does not match the model");
  for (const auto& block : h.blocks())
    for (std::size_t a = 0; a < block.size(); ++a)
      for (std::size_t b = a + 1; b < block.size(); ++b) {
        const double d = equiv_distance(m, h, block[a], block[b], mode);
        if (d > 1e-9)
          throw std::runtime_error(
              "partition is not an exact equivalence: distance " + format_double(d) +
              " between " + m.names[block[a]] + " and " + m.names[block[b]]);
      }
}

std::vector<std::string> unique_names(std::vector<std::string> names) {
  std::set<std::string> seen;
  for (auto& n : names) {
    std::string candidate = n;
    for (int k = 2; !seen.insert(candidate).second; ++k)
      candidate = n + "_" + std::to_string(k);
    n = candidate;
  }
  return names;
}

}  // namespace

bool ConstraintSystem::contains(const LinearForm& row) const {
  return std::find(rows.begin(), rows.end(), row) != rows.end();
}

Eigen::MatrixXd ConstraintSystem::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                            static_cast<Eigen::Index>(dimension));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (const auto& [v, c] : rows[r].coeffs) m(static_cast<Eigen::Index>(r), v) = c;
  return m;
}

ConstraintSystem build_constraints(const ExtendedPIVP& e, const Partition& h, Mode mode) {
  const std::size_t n = e.n_states();
  if (h.size() != n) throw std::invalid_argument("partition size does not match the model");
  std::set<LinearForm> rows;

  if (mode == Mode::Backward) {
    const auto sub = representative_map(h);
    for (const auto& block : h.blocks()) {
      for (std::size_t a = 0; a < block.size(); ++a)
        for (std::size_t b = a + 1; b < block.size(); ++b) {
          const Polynomial defect =
              substitute(e.rhs_hat[block[a]] - e.rhs_hat[block[b]], sub);
          collect_rows(defect, n, e.n_total(), rows);
        }
      for (std::size_t i = 0; i + 1 < block.size(); ++i)
        rows.insert(canonical_row({{block[i], 1.0}, {block[i + 1], -1.0}}));
    }
  } else {
    const VarId s = static_cast<VarId>(e.n_total());
    std::vector<Polynomial> block_sum(h.block_count());
    for (std::size_t k = 0; k < h.block_count(); ++k)
      for (VarId v : h.block(k)) block_sum[k] += e.rhs_hat[v];
    for (const auto& block : h.blocks())
      for (std::size_t a = 0; a < block.size(); ++a)
        for (std::size_t b = a + 1; b < block.size(); ++b) {
          const Polynomial sum_ab =
              Polynomial::variable(block[a]) + Polynomial::variable(block[b]);
          std::map<VarId, Polynomial> sub;
          sub.emplace(block[a], Polynomial::variable(s) * sum_ab);
          sub.emplace(block[b],
                      (Polynomial::constant(1.0) - Polynomial::variable(s)) * sum_ab);
          for (const auto& q : block_sum)
            collect_rows(q - substitute(q, sub), n, e.n_total(), rows);
        }
  }

  ConstraintSystem c;
  c.dimension = e.n_total();
  c.rows.assign(rows.begin(), rows.end());
  return c;
}

Eigen::VectorXd lsq_project(const ConstraintSystem& c, const Eigen::VectorXd& z0) {
  if (static_cast<std::size_t>(z0.size()) != c.dimension)
    throw std::invalid_argument("lsq_project: dimension mismatch");
  return project_to_nullspace(c.dense(), z0);
}

std::vector<double> solve_reference(const ExtendedPIVP& e, const ConstraintSystem& c) {
  if (c.dimension != e.n_total())
    throw std::invalid_argument("solve_reference: dimension mismatch");
  const Eigen::VectorXd z0 =
      Eigen::Map<const Eigen::VectorXd>(e.sigma0.data(), e.sigma0.size());
  const Eigen::VectorXd z = lsq_project(c, z0);
  const double residual = c.rows.empty() ? 0.0 : inf_norm(Eigen::VectorXd(c.dense() * z));
  if (residual > 1e-9 * std::max(1.0, z0.norm()))
    throw std::runtime_error("reference solve left residual " + format_double(residual));
  return std::vector<double>(z.data(), z.data() + z.size());
}

PIVP quotient_backward(const PIVP& m, const Partition& h) {
  check_exact(m, h, Mode::Backward);
  for (const auto& block : h.blocks())
    for (VarId v : block)
      if (std::abs(m.init[v] - m.init[block.front()]) > 1e-9)
        throw std::runtime_error("unequal within-block initial conditions for " +
                                 m.names[block.front()] + " and " + m.names[v]);

  std::map<VarId, Polynomial> sub;
  for (std::size_t k = 0; k < h.block_count(); ++k)
    for (VarId v : h.block(k))
      sub.emplace(v, Polynomial::variable(static_cast<VarId>(k)));

  PIVP out;
  for (std::size_t k = 0; k < h.block_count(); ++k) {
    const VarId rep = h.block(k).front();
    out.names.push_back(m.names[rep]);
    out.init.push_back(m.init[rep]);
    out.rhs.push_back(substitute(m.rhs[rep], sub));
  }
  out.names = unique_names(std::move(out.names));
  return out;
}

PIVP quotient_forward(const PIVP& m, const Partition& h) {
  check_exact(m, h, Mode::Forward);

  std::map<VarId, Polynomial> sub;
  for (std::size_t k = 0; k < h.block_count(); ++k) {
    const double share = 1.0 / static_cast<double>(h.block(k).size());
    for (VarId v : h.block(k))
      sub.emplace(v, share * Polynomial::variable(static_cast<VarId>(k)));
  }

  PIVP out;
  for (std::size_t k = 0; k < h.block_count(); ++k) {
    const auto& block = h.block(k);
    std::string name;
    if (block.size() <= 3) {
      for (VarId v : block) {
        if (!name.empty()) name += '_';
        name += m.names[v];
      }
    } else {
      name = m.names[block.front()] + "_agg" + std::to_string(block.size());
    }
    double init = 0.0;
    Polynomial sum;
    for (VarId v : block) {
      init += m.init[v];
      sum += m.rhs[v];
    }
    out.names.push_back(std::move(name));
    out.init.push_back(init);
    out.rhs.push_back(substitute(sum, sub));
  }
  out.names = unique_names(std::move(out.names));
  return out;
}

}  // namespace adeq
