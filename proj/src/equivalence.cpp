#include "adeq/equivalence.hpp"

#include <numeric>
#include <stdexcept>

namespace adeq {

namespace {

std::map<VarId, Polynomial> representative_map(const Partition& h) {
  std::map<VarId, Polynomial> sub;
  for (const auto& block : h.blocks()) {
    const VarId rep = block.front();
    for (std::size_t i = 1; i < block.size(); ++i)
      sub.emplace(block[i], Polynomial::variable(rep));
  }
  return sub;
}

double backward_distance(const PIVP& m, const Partition& h, VarId i, VarId j) {
  const auto sub = representative_map(h);
  const Polynomial defect = substitute(m.rhs[i] - m.rhs[j], sub);
  return defect.abs_coeff_sum();
}

double forward_distance(const PIVP& m, const Partition& h, VarId i, VarId j) {
  const VarId s = static_cast<VarId>(m.size());
  const Polynomial sum_ij = Polynomial::variable(i) + Polynomial::variable(j);
  std::map<VarId, Polynomial> sub;
  sub.emplace(i, Polynomial::variable(s) * sum_ij);
  sub.emplace(j, (Polynomial::constant(1.0) - Polynomial::variable(s)) * sum_ij);
  double total = 0.0;
  for (const auto& block : h.blocks()) {
    Polynomial aggregate;
    for (VarId v : block) aggregate += m.rhs[v];
    total += (aggregate - substitute(aggregate, sub)).abs_coeff_sum();
  }
  return total;
}

struct UnionFind {
  std::vector<std::size_t> parent;

  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }

  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }

  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

Mode parse_mode(std::string_view s) {
  if (s == "bde") return Mode::Backward;
  if (s == "fde") return Mode::Forward;
  throw std::invalid_argument("unknown mode '" + std::string(s) + "' (expected bde or fde)");
}

std::string_view mode_name(Mode mode) {
  return mode == Mode::Backward ? "bde" : "fde";
}

double equiv_distance(const PIVP& m, const Partition& h, VarId i, VarId j, Mode mode) {
  if (i >= m.size() || j >= m.size())
    throw std::invalid_argument("equiv_distance: variable out of range");
  if (h.block_index(i) != h.block_index(j))
    throw std::invalid_argument("equiv_distance: variables are in different blocks");
  if (i == j) return 0.0;
  return mode == Mode::Backward ? backward_distance(m, h, i, j)
                                : forward_distance(m, h, i, j);
}

Partition refine_step(const PIVP& m, const Partition& h, double epsilon, Mode mode) {
  std::vector<std::vector<VarId>> out;
  for (const auto& block : h.blocks()) {
    if (block.size() == 1) {
      out.push_back(block);
      continue;
    }
    UnionFind uf(block.size());
    for (std::size_t a = 0; a < block.size(); ++a)
      for (std::size_t b = a + 1; b < block.size(); ++b)
        if (equiv_distance(m, h, block[a], block[b], mode) <= epsilon) uf.unite(a, b);
    std::map<std::size_t, std::vector<VarId>> groups;
    for (std::size_t a = 0; a < block.size(); ++a)
      groups[uf.find(a)].push_back(block[a]);
    for (auto& [root, members] : groups) out.push_back(std::move(members));
  }
  return Partition(std::move(out), h.size());
}

Partition coarsest_partition(const PIVP& m, const Partition& g, double epsilon, Mode mode) {
  if (epsilon < 0.0) throw std::invalid_argument("epsilon must be nonnegative");
  if (g.size() != m.size())
    throw std::invalid_argument("partition size does not match the model");
  Partition h = g;
  for (std::size_t pass = 0; pass <= m.size(); ++pass) {
    Partition next = refine_step(m, h, epsilon, mode);
    if (next == h) return h;
    h = std::move(next);
  }
  throw std::logic_error("refinement failed to reach a fixpoint");
}

}  // namespace adeq
