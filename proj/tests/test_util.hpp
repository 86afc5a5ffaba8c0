#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "adeq/equivalence.hpp"
#include "adeq/htree.hpp"
#include "adeq/model.hpp"

namespace adeq::testing {

/// Term-by-term evaluation with std::pow, deliberately independent of
/// Polynomial::evaluate.
inline double naive_eval(const Polynomial& p, std::span<const double> point) {
  double acc = 0.0;
  for (const auto& [mono, c] : p.terms()) {
    double t = c;
    for (const auto& [v, e] : mono.entries())
      t *= std::pow(point[v], static_cast<double>(e));
    acc += t;
  }
  return acc;
}

inline Polynomial random_polynomial(SplitMix64& rng, std::size_t n_vars,
                                    unsigned max_degree, std::size_t n_terms,
                                    double coeff_scale = 2.0) {
  Polynomial p;
  for (std::size_t t = 0; t < n_terms; ++t) {
    const unsigned deg = static_cast<unsigned>(rng.next() % (max_degree + 1));
    MultiIndex mono;
    for (unsigned d = 0; d < deg; ++d)
      mono = mono.times(MultiIndex::var(static_cast<VarId>(rng.next() % n_vars)));
    p.add_term(mono, rng.uniform(-coeff_scale, coeff_scale));
  }
  return p;
}

inline PIVP random_pivp(SplitMix64& rng, std::size_t n, unsigned max_degree,
                        std::size_t terms_per_eq) {
  PIVP m;
  for (std::size_t i = 0; i < n; ++i) {
    m.names.push_back("x" + std::to_string(i + 1));
    m.init.push_back(rng.uniform(-1.0, 1.0));
    m.rhs.push_back(random_polynomial(rng, n, max_degree, terms_per_eq, 1.5));
  }
  return m;
}

/// All set partitions of {0..n-1} via restricted growth strings.
inline std::vector<Partition> all_partitions(std::size_t n) {
  std::vector<Partition> out;
  std::vector<std::size_t> assign(n, 0);
  const auto emit = [&] {
    std::size_t blocks = 0;
    for (std::size_t v = 0; v < n; ++v) blocks = std::max(blocks, assign[v] + 1);
    std::vector<std::vector<VarId>> b(blocks);
    for (std::size_t v = 0; v < n; ++v) b[assign[v]].push_back(static_cast<VarId>(v));
    out.emplace_back(std::move(b), n);
  };
  const auto rec = [&](auto&& self, std::size_t v, std::size_t max_used) -> void {
    if (v == n) {
      emit();
      return;
    }
    for (std::size_t k = 0; k <= max_used + 1 && k < n; ++k) {
      assign[v] = k;
      self(self, v + 1, std::max(max_used, k));
    }
  };
  if (n == 0) return out;
  assign[0] = 0;
  rec(rec, 1, 0);
  return out;
}

/// Extension wrapper with an empty parameter list, for systems whose
/// coefficients should stay literal.
inline ExtendedPIVP literal_extension(const PIVP& m) {
  ExtendedPIVP e;
  e.base = m;
  e.rhs_hat = m.rhs;
  e.sigma0 = m.init;
  return e;
}

/// Projection of z0 onto the null space of c through an explicit kernel
/// basis, as an oracle for the decomposition-based route.
inline Eigen::VectorXd kernel_projection(const Eigen::MatrixXd& c,
                                         const Eigen::VectorXd& z0) {
  if (c.rows() == 0) return z0;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(c);
  lu.setThreshold(1e-10);
  if (lu.dimensionOfKernel() == 0) return Eigen::VectorXd::Zero(z0.size());
  const Eigen::MatrixXd basis = lu.kernel();
  return basis * (basis.transpose() * basis).ldlt().solve(basis.transpose() * z0);
}

inline bool is_fixpoint(const PIVP& m, const Partition& p, double eps, Mode mode) {
  return refine_step(m, p, eps, mode) == p;
}

/// True when h is the unique coarsest refinement-fixpoint of g, checked by
/// enumerating every partition of the variable set. Only viable for tiny n.
inline bool coarsest_by_enumeration(const PIVP& m, const Partition& g, double eps,
                                    Mode mode, const Partition& h) {
  if (!h.refines(g) || !is_fixpoint(m, h, eps, mode)) return false;
  for (const Partition& p : all_partitions(m.size()))
    if (p.refines(g) && is_fixpoint(m, p, eps, mode) && !p.refines(h)) return false;
  return true;
}

inline const char* running_example_text() {
  return "vars x1 x2 x3\n"
         "init x1 = 1.0\n"
         "init x2 = 0.5\n"
         "init x3 = 0.5\n"
         "eq d(x1) = -4.0*x1 + x2 + x3\n"
         "eq d(x2) = 1.99*x1 - x2\n"
         "eq d(x3) = 2.01*x1 - x3\n"
         "partition {x1} {x2 x3}\n";
}

inline ParsedModel running_example() { return parse_model(running_example_text()); }

}  // namespace adeq::testing
