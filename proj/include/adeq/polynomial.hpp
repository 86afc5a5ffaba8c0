#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace adeq {

/// Identifies a variable: an ODE state, a parameter introduced by the
/// extension, or an auxiliary symbol. Ids are dense and model-scoped; the
/// owning model maps each id to a printable name.
using VarId = std::uint32_t;

/// Exponent vector of a monomial. Entries are (variable, exponent) pairs,
/// sorted by variable, with strictly positive exponents. The empty index is
/// the constant monomial.
class MultiIndex {
public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<std::pair<VarId, unsigned>> entries);

  static MultiIndex var(VarId v, unsigned exponent = 1);

  unsigned exponent(VarId v) const;
  unsigned degree() const;
  bool is_constant() const { return entries_.empty(); }

  MultiIndex times(const MultiIndex& rhs) const;

  const std::vector<std::pair<VarId, unsigned>>& entries() const { return entries_; }

  bool operator==(const MultiIndex& rhs) const { return entries_ == rhs.entries_; }

  /// Graded lexicographic: total degree first, then entrywise by variable.
  bool operator<(const MultiIndex& rhs) const;

private:
  std::vector<std::pair<VarId, unsigned>> entries_;
};

/// Sparse multivariate polynomial with real coefficients, kept in normal
/// form: each monomial stored at most once, never with a coefficient that is
/// exactly zero. Value type; all operations return new polynomials, so
/// instances are safe to share across threads once built.
class Polynomial {
public:
  Polynomial() = default;

  static Polynomial constant(double c);
  static Polynomial variable(VarId v);
  static Polynomial monomial(MultiIndex m, double c);

  bool is_zero() const { return terms_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  unsigned degree() const;

  /// Coefficient of the given monomial; 0.0 when absent.
  double coefficient(const MultiIndex& m) const;

  const std::map<MultiIndex, double>& terms() const { return terms_; }

  /// Sum of absolute values of all coefficients.
  double abs_coeff_sum() const;

  /// Partial derivative with respect to one variable.
  Polynomial derivative(VarId v) const;

  /// Evaluates at a point indexed by VarId. Every variable occurring in the
  /// polynomial must have an entry; otherwise throws naming the variable.
  double evaluate(std::span<const double> point) const;

  /// Ids of all variables occurring with nonzero exponent, ascending.
  std::vector<VarId> variables() const;

  Polynomial& operator+=(const Polynomial& rhs);
  Polynomial& operator-=(const Polynomial& rhs);
  friend Polynomial operator+(Polynomial lhs, const Polynomial& rhs);
  friend Polynomial operator-(Polynomial lhs, const Polynomial& rhs);
  friend Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs);
  friend Polynomial operator*(double c, const Polynomial& p);
  friend Polynomial operator-(const Polynomial& p);

  bool operator==(const Polynomial& rhs) const { return terms_ == rhs.terms_; }

  /// Adds c * m, merging with an existing term and dropping exact zeros.
  void add_term(const MultiIndex& m, double c);

private:
  std::map<MultiIndex, double> terms_;
};

/// Sums a term list into normal form.
Polynomial normalize(const std::vector<std::pair<MultiIndex, double>>& terms);

/// p^k by repeated multiplication; p^0 is the constant 1.
Polynomial pow(const Polynomial& p, unsigned k);

/// Simultaneously replaces each mapped variable by the given polynomial;
/// unmapped variables pass through.
Polynomial substitute(const Polynomial& p, const std::map<VarId, Polynomial>& map);

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double x);

std::string format_monomial(const MultiIndex& m,
                            const std::function<std::string(VarId)>& name);

/// Renders terms in graded lexicographic order as a signed sum, e.g.
/// "-4*x1 + x2 + 2*x2*x3". The zero polynomial renders as "0".
std::string format_polynomial(const Polynomial& p,
                              const std::function<std::string(VarId)>& name);

}  // namespace adeq
