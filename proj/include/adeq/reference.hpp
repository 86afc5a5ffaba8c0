#pragma once

#include <Eigen/Dense>

#include "adeq/equivalence.hpp"
#include "adeq/model.hpp"

namespace adeq {

/// One homogeneous linear constraint over parameter/state coordinates:
/// sum of coeff * sigma[var] = 0. Entries sorted by variable, first nonzero
/// coefficient positive.
struct LinearForm {
  std::vector<std::pair<VarId, double>> coeffs;

  bool operator==(const LinearForm& rhs) const { return coeffs == rhs.coeffs; }
  bool operator<(const LinearForm& rhs) const { return coeffs < rhs.coeffs; }
};

/// Homogeneous system C sigma = 0 over the coordinates of an extended model
/// (states then parameters). Rows are deduplicated and canonically ordered.
struct ConstraintSystem {
  std::size_t dimension = 0;
  std::vector<LinearForm> rows;

  bool contains(const LinearForm& row) const;
  Eigen::MatrixXd dense() const;
};

/// Linear constraints that force every within-block defect polynomial of the
/// extended model to vanish identically, plus equality chains tying the
/// sigma coordinates of block members together. A sigma satisfying the
/// system makes the partition an exact equivalence of the instantiated
/// model.
ConstraintSystem build_constraints(const ExtendedPIVP& e, const Partition& h, Mode mode);

/// Nearest point to z0 (Euclidean norm) in the null space of the system.
Eigen::VectorXd lsq_project(const ConstraintSystem& c, const Eigen::VectorXd& z0);

/// Reference assignment: the projection of sigma0 onto the constraint null
/// space; the unique minimizer of ||sigma - sigma0||_2 subject to the
/// constraints. Verifies the residual before returning.
std::vector<double> solve_reference(const ExtendedPIVP& e, const ConstraintSystem& c);

/// Collapses each block to its representative variable, keeping the
/// representative's equation. Requires all within-block distances <= 1e-9
/// and equal within-block initial conditions.
PIVP quotient_backward(const PIVP& m, const Partition& h);

/// Aggregates each block into a sum variable; occurrences of a variable are
/// redistributed uniformly over its block. Requires all within-block
/// distances <= 1e-9. Initial conditions add up.
PIVP quotient_forward(const PIVP& m, const Partition& h);

}  // namespace adeq
