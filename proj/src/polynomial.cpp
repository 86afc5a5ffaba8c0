#include "adeq/polynomial.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>
#include <system_error>

namespace adeq {

MultiIndex::MultiIndex(std::vector<std::pair<VarId, unsigned>> entries)
    : entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end());
  std::size_t out = 0;
  for (std::size_t i = 0; i < entries_.size();) {
    VarId v = entries_[i].first;
    unsigned e = 0;
    for (; i < entries_.size() && entries_[i].first == v; ++i) e += entries_[i].second;
    if (e > 0) entries_[out++] = {v, e};
  }
  entries_.resize(out);
}

MultiIndex MultiIndex::var(VarId v, unsigned exponent) {
  MultiIndex m;
  if (exponent > 0) m.entries_.emplace_back(v, exponent);
  return m;
}

unsigned MultiIndex::exponent(VarId v) const {
  for (const auto& [w, e] : entries_)
    if (w == v) return e;
  return 0;
}

unsigned MultiIndex::degree() const {
  unsigned d = 0;
  for (const auto& [v, e] : entries_) d += e;
  return d;
}

MultiIndex MultiIndex::times(const MultiIndex& rhs) const {
  MultiIndex out;
  out.entries_.reserve(entries_.size() + rhs.entries_.size());
  auto a = entries_.begin();
  auto b = rhs.entries_.begin();
  while (a != entries_.end() || b != rhs.entries_.end()) {
    if (b == rhs.entries_.end() || (a != entries_.end() && a->first < b->first)) {
      out.entries_.push_back(*a++);
    } else if (a == entries_.end() || b->first < a->first) {
      out.entries_.push_back(*b++);
    } else {
      out.entries_.emplace_back(a->first, a->second + b->second);
      ++a, ++b;
    }
  }
  return out;
}

bool MultiIndex::operator<(const MultiIndex& rhs) const {
  const unsigned da = degree(), db = rhs.degree();
  if (da != db) return da < db;
  return entries_ < rhs.entries_;
}

Polynomial Polynomial::constant(double c) {
  Polynomial p;
  p.add_term(MultiIndex{}, c);
  return p;
}

Polynomial Polynomial::variable(VarId v) {
  Polynomial p;
  p.add_term(MultiIndex::var(v), 1.0);
  return p;
}

Polynomial Polynomial::monomial(MultiIndex m, double c) {
  Polynomial p;
  p.add_term(m, c);
  return p;
}

unsigned Polynomial::degree() const {
  unsigned d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

double Polynomial::coefficient(const MultiIndex& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::abs_coeff_sum() const {
  double s = 0.0;
  for (const auto& [m, c] : terms_) s += std::abs(c);
  return s;
}

Polynomial Polynomial::derivative(VarId v) const {
  Polynomial out;
  for (const auto& [m, c] : terms_) {
    const unsigned e = m.exponent(v);
    if (e == 0) continue;
    std::vector<std::pair<VarId, unsigned>> entries;
    for (const auto& [w, k] : m.entries())
      if (w != v)
        entries.emplace_back(w, k);
      else if (k > 1)
        entries.emplace_back(w, k - 1);
    out.add_term(MultiIndex{std::move(entries)}, c * e);
  }
  return out;
}

double Polynomial::evaluate(std::span<const double> point) const {
  double acc = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = c;
    for (const auto& [v, e] : m.entries()) {
      if (v >= point.size())
        throw std::out_of_range("evaluate: no value assigned to variable v" +
                                std::to_string(v));
      const double b = point[v];
      for (unsigned k = 0; k < e; ++k) t *= b;
    }
    acc += t;
  }
  return acc;
}

std::vector<VarId> Polynomial::variables() const {
  std::vector<VarId> out;
  for (const auto& [m, c] : terms_)
    for (const auto& [v, e] : m.entries()) out.push_back(v);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void Polynomial::add_term(const MultiIndex& m, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  for (const auto& [m, c] : rhs.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
  for (const auto& [m, c] : rhs.terms_) add_term(m, -c);
  return *this;
}

Polynomial operator+(Polynomial lhs, const Polynomial& rhs) {
  lhs += rhs;
  return lhs;
}

Polynomial operator-(Polynomial lhs, const Polynomial& rhs) {
  lhs -= rhs;
  return lhs;
}

Polynomial operator*(const Polynomial& lhs, const Polynomial& rhs) {
  Polynomial out;
  for (const auto& [ma, ca] : lhs.terms_)
    for (const auto& [mb, cb] : rhs.terms_) out.add_term(ma.times(mb), ca * cb);
  return out;
}

Polynomial operator*(double c, const Polynomial& p) {
  Polynomial out;
  for (const auto& [m, k] : p.terms_) out.add_term(m, c * k);
  return out;
}

Polynomial operator-(const Polynomial& p) { return -1.0 * p; }

Polynomial normalize(const std::vector<std::pair<MultiIndex, double>>& terms) {
  Polynomial out;
  for (const auto& [m, c] : terms) out.add_term(m, c);
  return out;
}

Polynomial pow(const Polynomial& p, unsigned k) {
  Polynomial out = Polynomial::constant(1.0);
  for (unsigned i = 0; i < k; ++i) out = out * p;
  return out;
}

Polynomial substitute(const Polynomial& p, const std::map<VarId, Polynomial>& map) {
  Polynomial out;
  for (const auto& [m, c] : p.terms()) {
    Polynomial term = Polynomial::constant(c);
    MultiIndex pass;
    for (const auto& [v, e] : m.entries()) {
      auto it = map.find(v);
      if (it == map.end())
        pass = pass.times(MultiIndex::var(v, e));
      else
        term = term * pow(it->second, e);
    }
    if (!pass.is_constant()) term = term * Polynomial::monomial(pass, 1.0);
    out += term;
  }
  return out;
}

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

std::string format_monomial(const MultiIndex& m,
                            const std::function<std::string(VarId)>& name) {
  if (m.is_constant()) return "1";
  std::string out;
  for (const auto& [v, e] : m.entries()) {
    if (!out.empty()) out += '*';
    out += name(v);
    if (e > 1) {
      out += '^';
      out += std::to_string(e);
    }
  }
  return out;
}

std::string format_polynomial(const Polynomial& p,
                              const std::function<std::string(VarId)>& name) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    const bool neg = std::signbit(c);
    if (first)
      out += neg ? "-" : "";
    else
      out += neg ? " - " : " + ";
    first = false;
    const double a = std::abs(c);
    if (m.is_constant())
      out += format_double(a);
    else if (a == 1.0)
      out += format_monomial(m, name);
    else
      out += format_double(a) + "*" + format_monomial(m, name);
  }
  return out;
}

}  // namespace adeq
