#pragma once

#include "adeq/model.hpp"

namespace adeq {

/// The two equivalence flavors: backward collapses variables onto block
/// representatives, forward compares block-aggregated dynamics under a
/// one-parameter redistribution of a pair.
enum class Mode { Backward, Forward };

Mode parse_mode(std::string_view s);
std::string_view mode_name(Mode mode);

/// Distance between two variables of the same block of H. Zero distance is
/// exact equivalence of the pair relative to H; the value is the absolute
/// coefficient sum of the defect polynomial.
double equiv_distance(const PIVP& m, const Partition& h, VarId i, VarId j, Mode mode);

/// One refinement pass: splits every block by the epsilon-closeness relation
/// (transitively closed within the block). The result refines h.
Partition refine_step(const PIVP& m, const Partition& h, double epsilon, Mode mode);

/// Iterates refine_step from g to its fixpoint: the coarsest partition that
/// refines g, is a fixpoint of the refinement, and within which all pairwise
/// distances are at most epsilon. Terminates in at most |vars| passes.
Partition coarsest_partition(const PIVP& m, const Partition& g, double epsilon, Mode mode);

}  // namespace adeq
