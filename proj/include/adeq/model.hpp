#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "adeq/polynomial.hpp"

namespace adeq {

/// Polynomial initial value problem: one polynomial right-hand side and one
/// initial value per variable. Variable ids are 0..n-1 in declaration order.
struct PIVP {
  std::vector<std::string> names;
  std::vector<Polynomial> rhs;
  std::vector<double> init;

  std::size_t size() const { return names.size(); }

  /// Id for a declared name; throws if unknown.
  VarId var(std::string_view name) const;
};

/// Partition of the variable set. Canonical form: members of each block
/// ascending, blocks ordered by their least member, every variable covered
/// exactly once.
class Partition {
public:
  Partition() = default;
  Partition(std::vector<std::vector<VarId>> blocks, std::size_t n);

  static Partition single_block(std::size_t n);
  static Partition singletons(std::size_t n);

  const std::vector<std::vector<VarId>>& blocks() const { return blocks_; }
  std::size_t block_count() const { return blocks_.size(); }
  std::size_t size() const { return block_of_.size(); }

  std::size_t block_index(VarId v) const { return block_of_.at(v); }
  const std::vector<VarId>& block(std::size_t k) const { return blocks_.at(k); }

  /// Least member of the block containing v.
  VarId representative(VarId v) const { return blocks_[block_of_[v]].front(); }

  /// True when every block of this partition lies inside a block of other.
  bool refines(const Partition& other) const;

  bool operator==(const Partition& rhs) const { return blocks_ == rhs.blocks_; }

private:
  std::vector<std::vector<VarId>> blocks_;
  std::vector<std::size_t> block_of_;
};

/// Model with every right-hand-side coefficient promoted to a frozen
/// parameter. States keep ids 0..n-1; parameter j has id n+j. rhs_hat holds
/// the parametric right-hand sides over states and parameters; parameters
/// themselves have derivative zero and are not stored as equations. sigma0
/// maps ids 0..n+p-1 to the original initial values and coefficients.
struct ExtendedPIVP {
  PIVP base;

  struct Param {
    std::string name;
    VarId equation;
    MultiIndex monomial;
  };

  std::vector<Param> params;
  std::vector<Polynomial> rhs_hat;
  std::vector<double> sigma0;

  std::size_t n_states() const { return base.size(); }
  std::size_t n_params() const { return params.size(); }
  std::size_t n_total() const { return n_states() + n_params(); }

  /// Printable name for any id: state name or parameter name.
  std::string name(VarId v) const;

  /// Largest total degree over the parametric right-hand sides, counting
  /// parameters as variables.
  unsigned degree() const;
};

struct ParsedModel {
  PIVP pivp;
  std::optional<Partition> partition;
};

/// Parses the line-oriented model format: `vars`, `init`, `eq d(x) = ...`,
/// optional `partition {..} {..}`, `#` comments. Errors carry line/column.
ParsedModel parse_model(std::string_view text);

/// Parses a partition written as blocks of declared names, e.g.
/// "{x1} {x2 x3}". Must cover the variable set exactly.
Partition parse_partition(std::string_view text, const PIVP& m);

/// Emits the model in canonical form: declaration order, graded
/// lexicographic term order, shortest round-tripping numbers. The result
/// parses back to an identical model.
std::string serialize_model(const PIVP& m, const Partition* partition = nullptr);

std::string format_partition(const Partition& p, const PIVP& m);

/// Promotes every coefficient to a parameter, in term order per equation.
ExtendedPIVP extend(const PIVP& m);

/// Substitutes parameter values into rhs_hat and restricts sigma to the
/// states, producing a plain model. Coefficients that come out exactly zero
/// are dropped. instantiate(extend(m), extend(m).sigma0) == m.
PIVP instantiate(const ExtendedPIVP& e, std::span<const double> sigma);

}  // namespace adeq
