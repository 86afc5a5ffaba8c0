#include "adeq/model.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace adeq {

namespace {

struct Token {
  enum Kind { Ident, Number, Symbol, End };
  Kind kind = End;
  std::string text;
  double value = 0.0;
  int line = 0;
  int col = 0;
};

[[noreturn]] void fail(int line, int col, const std::string& msg) {
  throw std::runtime_error("line " + std::to_string(line) + ", col " +
                           std::to_string(col) + ": " + msg);
}

std::vector<Token> tokenize_line(const std::string& raw, int line_no) {
  std::vector<Token> out;
  std::string_view s{raw};
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const int col = static_cast<int>(i) + 1;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i + 1;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
        ++j;
      out.push_back({Token::Ident, std::string(s.substr(i, j - i)), 0.0, line_no, col});
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && i + 1 < s.size() &&
                std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && s[j] == '.') {
        ++j;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      }
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          j = k;
          while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        }
      }
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + j, value);
      if (ec != std::errc{} || ptr != s.data() + j)
        fail(line_no, col, "malformed number '" + std::string(s.substr(i, j - i)) + "'");
      out.push_back({Token::Number, std::string(s.substr(i, j - i)), value, line_no, col});
      i = j;
    } else if (std::string_view("=(){}*^+-,").find(c) != std::string_view::npos) {
      out.push_back({Token::Symbol, std::string(1, c), 0.0, line_no, col});
      ++i;
    } else {
      fail(line_no, col, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Token::End, "", 0.0, line_no, static_cast<int>(s.size()) + 1});
  return out;
}

class LineParser {
public:
  LineParser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  const Token& peek() const { return toks_[std::min(pos_, toks_.size() - 1)]; }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Token::End; }

  bool accept_symbol(const char* s) {
    if (peek().kind == Token::Symbol && peek().text == s) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect_symbol(const char* s) {
    if (!accept_symbol(s))
      fail(peek().line, peek().col, std::string("expected '") + s + "'");
  }

  std::string expect_ident(const char* what) {
    if (peek().kind != Token::Ident) fail(peek().line, peek().col, std::string("expected ") + what);
    return next().text;
  }

private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

unsigned expect_exponent(LineParser& p) {
  const Token& t = p.peek();
  if (t.kind != Token::Number || t.value < 0.0 || t.value != std::floor(t.value) ||
      t.value > 64.0)
    fail(t.line, t.col, "exponent must be a small nonnegative integer");
  p.next();
  return static_cast<unsigned>(t.value);
}

using Resolver = std::function<VarId(const Token&)>;

Polynomial parse_polynomial(LineParser& p, const Resolver& resolve) {
  Polynomial out;
  bool first = true;
  while (true) {
    double sign = 1.0;
    if (p.accept_symbol("-"))
      sign = -1.0;
    else if (p.accept_symbol("+"))
      sign = 1.0;
    else if (!first)
      break;
    first = false;

    double coeff = sign;
    MultiIndex mono;
    bool any = false;
    while (true) {
      const Token& t = p.peek();
      if (t.kind == Token::Number) {
        coeff *= p.next().value;
        any = true;
      } else if (t.kind == Token::Ident) {
        const Token var_tok = p.next();
        unsigned e = 1;
        if (p.accept_symbol("^")) e = expect_exponent(p);
        mono = mono.times(MultiIndex::var(resolve(var_tok), e));
        any = true;
      } else {
        fail(t.line, t.col, "expected a coefficient or variable");
      }
      if (!p.accept_symbol("*")) break;
    }
    if (!any) fail(p.peek().line, p.peek().col, "empty term");
    out.add_term(mono, coeff);

    const Token& t = p.peek();
    if (t.kind == Token::End) break;
    if (!(t.kind == Token::Symbol && (t.text == "+" || t.text == "-")))
      fail(t.line, t.col, "expected '+', '-', or end of expression");
  }
  return out;
}

double expect_signed_number(LineParser& p) {
  double sign = 1.0;
  if (p.accept_symbol("-")) sign = -1.0;
  const Token& t = p.peek();
  if (t.kind != Token::Number) fail(t.line, t.col, "expected a number");
  p.next();
  return sign * t.value;
}

}  // namespace

VarId PIVP::var(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<VarId>(i);
  throw std::runtime_error("unknown variable '" + std::string(name) + "'");
}

Partition::Partition(std::vector<std::vector<VarId>> blocks, std::size_t n)
    : blocks_(std::move(blocks)) {
  for (auto& b : blocks_) {
    if (b.empty()) throw std::invalid_argument("partition: empty block");
    std::sort(b.begin(), b.end());
  }
  std::sort(blocks_.begin(), blocks_.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  block_of_.assign(n, blocks_.size());
  for (std::size_t k = 0; k < blocks_.size(); ++k)
    for (VarId v : blocks_[k]) {
      if (v >= n) throw std::invalid_argument("partition: variable out of range");
      if (block_of_[v] != blocks_.size())
        throw std::invalid_argument("partition: variable listed twice");
      block_of_[v] = k;
    }
  for (std::size_t v = 0; v < n; ++v)
    if (block_of_[v] == blocks_.size())
      throw std::invalid_argument("partition: variable not covered");
}

Partition Partition::single_block(std::size_t n) {
  std::vector<VarId> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<VarId>(i);
  return Partition({all}, n);
}

Partition Partition::singletons(std::size_t n) {
  std::vector<std::vector<VarId>> blocks(n);
  for (std::size_t i = 0; i < n; ++i) blocks[i] = {static_cast<VarId>(i)};
  return Partition(std::move(blocks), n);
}

bool Partition::refines(const Partition& other) const {
  if (size() != other.size()) return false;
  for (const auto& b : blocks_) {
    const std::size_t k = other.block_index(b.front());
    for (VarId v : b)
      if (other.block_index(v) != k) return false;
  }
  return true;
}

std::string ExtendedPIVP::name(VarId v) const {
  if (v < n_states()) return base.names[v];
  return params.at(v - n_states()).name;
}

unsigned ExtendedPIVP::degree() const {
  unsigned d = 0;
  for (const auto& q : rhs_hat) d = std::max(d, q.degree());
  return d;
}

ParsedModel parse_model(std::string_view text) {
  std::vector<std::string> names;
  std::map<std::string, VarId, std::less<>> ids;
  std::vector<std::optional<Polynomial>> rhs;
  std::vector<std::optional<double>> init;
  std::optional<Partition> partition;
  std::vector<std::vector<VarId>> partition_blocks;
  bool saw_partition = false;
  int partition_line = 0;

  const auto resolve = [&](const Token& t) -> VarId {
    auto it = ids.find(t.text);
    if (it == ids.end())
      fail(t.line, t.col, "undeclared variable '" + t.text + "'");
    return it->second;
  };

  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    LineParser p{tokenize_line(raw, line_no)};
    if (p.at_end()) continue;
    const Token head = p.peek();
    const std::string kw = p.expect_ident("a directive (vars, init, eq, partition)");

    if (kw == "vars") {
      if (p.at_end()) fail(head.line, head.col, "vars: expected at least one name");
      while (!p.at_end()) {
        const Token& t = p.peek();
        const std::string name = p.expect_ident("a variable name");
        if (ids.count(name)) fail(t.line, t.col, "duplicate variable '" + name + "'");
        ids.emplace(name, static_cast<VarId>(names.size()));
        names.push_back(name);
        rhs.emplace_back();
        init.emplace_back();
      }
    } else if (kw == "init") {
      const Token t = p.peek();
      const std::string name = p.expect_ident("a variable name");
      const VarId v = resolve(t);
      p.expect_symbol("=");
      const double value = expect_signed_number(p);
      if (!p.at_end()) fail(p.peek().line, p.peek().col, "trailing tokens after init");
      if (init[v].has_value()) fail(t.line, t.col, "duplicate init for '" + name + "'");
      init[v] = value;
    } else if (kw == "eq") {
      const std::string d = p.expect_ident("'d'");
      if (d != "d") fail(head.line, head.col, "expected 'd(var)' after eq");
      p.expect_symbol("(");
      const Token t = p.peek();
      const std::string name = p.expect_ident("a variable name");
      const VarId v = resolve(t);
      p.expect_symbol(")");
      p.expect_symbol("=");
      if (rhs[v].has_value()) fail(t.line, t.col, "duplicate equation for '" + name + "'");
      rhs[v] = parse_polynomial(p, resolve);
    } else if (kw == "partition") {
      if (saw_partition) fail(head.line, head.col, "duplicate partition");
      saw_partition = true;
      partition_line = head.line;
      std::set<VarId> seen;
      while (!p.at_end()) {
        p.expect_symbol("{");
        std::vector<VarId> block;
        while (!p.accept_symbol("}")) {
          const Token t = p.peek();
          p.expect_ident("a variable name");
          const VarId v = resolve(t);
          if (!seen.insert(v).second)
            fail(t.line, t.col, "variable '" + t.text + "' in two blocks");
          block.push_back(v);
        }
        if (block.empty()) fail(head.line, head.col, "empty partition block");
        partition_blocks.push_back(std::move(block));
      }
      if (partition_blocks.empty())
        fail(head.line, head.col, "partition: expected at least one block");
    } else {
      fail(head.line, head.col, "unknown directive '" + kw + "'");
    }
  }

  if (names.empty()) throw std::runtime_error("model declares no variables");

  PIVP m;
  m.names = names;
  m.rhs.resize(names.size());
  m.init.resize(names.size());
  std::string missing;
  for (std::size_t v = 0; v < names.size(); ++v) {
    if (!rhs[v].has_value()) {
      if (!missing.empty()) missing += ", ";
      missing += names[v];
    } else {
      m.rhs[v] = *rhs[v];
    }
    m.init[v] = init[v].value_or(0.0);
  }
  if (!missing.empty()) throw std::runtime_error("missing equation for: " + missing);

  if (saw_partition) {
    std::size_t covered = 0;
    for (const auto& b : partition_blocks) covered += b.size();
    if (covered != names.size())
      fail(partition_line, 1, "partition does not cover the variable set");
    partition = Partition(std::move(partition_blocks), names.size());
  }

  return {std::move(m), std::move(partition)};
}

Partition parse_partition(std::string_view text, const PIVP& m) {
  const std::string line = "partition " + std::string(text);
  LineParser p{tokenize_line(line, 1)};
  p.expect_ident("partition");
  std::set<VarId> seen;
  std::vector<std::vector<VarId>> blocks;
  while (!p.at_end()) {
    p.expect_symbol("{");
    std::vector<VarId> block;
    while (!p.accept_symbol("}")) {
      const Token t = p.peek();
      const std::string name = p.expect_ident("a variable name");
      VarId v;
      try {
        v = m.var(name);
      } catch (const std::exception&) {
        fail(t.line, t.col, "undeclared variable '" + name + "'");
      }
      if (!seen.insert(v).second) fail(t.line, t.col, "variable '" + name + "' in two blocks");
      block.push_back(v);
    }
    if (block.empty()) throw std::runtime_error("partition: empty block");
    blocks.push_back(std::move(block));
  }
  if (seen.size() != m.size())
    throw std::runtime_error("partition does not cover the variable set");
  return Partition(std::move(blocks), m.size());
}

std::string format_partition(const Partition& p, const PIVP& m) {
  std::string out = "partition";
  for (const auto& b : p.blocks()) {
    out += " {";
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (i) out += ' ';
      out += m.names[b[i]];
    }
    out += '}';
  }
  return out;
}

std::string serialize_model(const PIVP& m, const Partition* partition) {
  const auto name = [&](VarId v) { return m.names.at(v); };
  std::string out = "vars";
  for (const auto& n : m.names) out += " " + n;
  out += '\n';
  for (std::size_t v = 0; v < m.size(); ++v)
    out += "init " + m.names[v] + " = " + format_double(m.init[v]) + "\n";
  for (std::size_t v = 0; v < m.size(); ++v)
    out += "eq d(" + m.names[v] + ") = " + format_polynomial(m.rhs[v], name) + "\n";
  if (partition) out += format_partition(*partition, m) + "\n";
  return out;
}

ExtendedPIVP extend(const PIVP& m) {
  ExtendedPIVP e;
  e.base = m;
  const std::size_t n = m.size();
  e.rhs_hat.resize(n);
  e.sigma0 = m.init;
  const auto name = [&](VarId v) { return m.names.at(v); };
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [mono, c] : m.rhs[i].terms()) {
      const VarId pid = static_cast<VarId>(n + e.params.size());
      e.params.push_back(
          {"c(" + m.names[i] + "," + format_monomial(mono, name) + ")",
           static_cast<VarId>(i), mono});
      e.rhs_hat[i].add_term(mono.times(MultiIndex::var(pid)), 1.0);
      e.sigma0.push_back(c);
    }
  }
  return e;
}

PIVP instantiate(const ExtendedPIVP& e, std::span<const double> sigma) {
  if (sigma.size() != e.n_total())
    throw std::invalid_argument("instantiate: sigma has wrong dimension");
  const std::size_t n = e.n_states();
  PIVP m;
  m.names = e.base.names;
  m.init.assign(sigma.begin(), sigma.begin() + n);
  m.rhs.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [mono, c] : e.rhs_hat[i].terms()) {
      double value = c;
      std::vector<std::pair<VarId, unsigned>> state_part;
      for (const auto& [v, k] : mono.entries()) {
        if (v < n) {
          state_part.emplace_back(v, k);
        } else {
          for (unsigned j = 0; j < k; ++j) value *= sigma[v];
        }
      }
      m.rhs[i].add_term(MultiIndex{std::move(state_part)}, value);
    }
  }
  return m;
}

}  // namespace adeq
