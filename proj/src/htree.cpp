#include "adeq/htree.hpp"

#include <stdexcept>
#include <string>

namespace adeq {

namespace {

constexpr double kNominalR[8] = {3.19, 6.37, 12.75, 25.50, 50.00, 100.00, 200.00, 400.00};
constexpr double kNominalC[8] = {0.280, 0.300, 0.130, 0.140, 0.070, 0.070, 0.035, 0.035};

std::string vname(int i, int k) { return "v" + std::to_string(i) + "_" + std::to_string(k); }
std::string wname(int i, int k) { return "w" + std::to_string(i) + "_" + std::to_string(k); }
std::string gname(int k) { return "g2_" + std::to_string(k); }

}  // namespace

HtreeModel gen_htree(const HtreeOptions& opts) {
  const int N = opts.depth;
  if (N < 1 || N > 8) throw std::invalid_argument("gen-htree: depth must be in 1..8");
  if (opts.eta < 0.0 || opts.eta >= 1.0)
    throw std::invalid_argument("gen-htree: eta must be in [0, 1)");

  SplitMix64 rng(opts.seed);
  // Per-node draws, depth-major, R before C, independent of everything else.
  std::vector<std::vector<double>> R(N + 1), C(N + 1);
  for (int i = 1; i <= N; ++i) {
    const int width = 1 << (i - 1);
    R[i].resize(width + 1);
    C[i].resize(width + 1);
    for (int k = 1; k <= width; ++k) {
      R[i][k] = kNominalR[i - 1] * rng.uniform(1.0 - opts.eta, 1.0 + opts.eta);
      C[i][k] = kNominalC[i - 1] * rng.uniform(1.0 - opts.eta, 1.0 + opts.eta);
    }
  }

  PIVP m;
  const auto declare = [&m](const std::string& name, double init) {
    m.names.push_back(name);
    m.init.push_back(init);
    return static_cast<VarId>(m.names.size() - 1);
  };

  std::vector<std::vector<VarId>> v(N + 1), w(N + 1);
  for (int i = 1; i <= N; ++i) {
    const int width = 1 << (i - 1);
    v[i].resize(width + 1);
    for (int k = 1; k <= width; ++k) v[i][k] = declare(vname(i, k), 0.0);
  }
  const VarId w_root = declare(wname(1, 1), 1.0 / (R[1][1] * C[1][1]));
  VarId g[3] = {0, 0, 0};
  if (N >= 2) {
    g[1] = declare(gname(1), 1.0 / (R[2][1] * C[1][1]));
    g[2] = declare(gname(2), 1.0 / (R[2][2] * C[1][1]));
  }
  for (int i = 2; i <= N; ++i) {
    const int width = 1 << (i - 1);
    w[i].resize(width + 1);
    for (int k = 1; k <= width; ++k)
      w[i][k] = declare(wname(i, k), 1.0 / (R[i][k] * C[i][k]));
  }

  m.rhs.resize(m.names.size());

  const auto bilinear = [](VarId a, VarId b, double c) {
    return Polynomial::monomial(MultiIndex::var(a).times(MultiIndex::var(b)), c);
  };

  // Root node: source drive plus the two child couplings.
  Polynomial root = Polynomial::monomial(MultiIndex::var(w_root), opts.vs) -
                    bilinear(v[1][1], w_root, 1.0);
  if (N >= 2)
    for (int k = 1; k <= 2; ++k)
      root += bilinear(v[2][k], g[k], 1.0) - bilinear(v[1][1], g[k], 1.0);
  m.rhs[v[1][1]] = root;

  for (int i = 2; i <= N; ++i)
    for (int k = 1; k <= (1 << (i - 1)); ++k)
      m.rhs[v[i][k]] = bilinear(v[i - 1][(k + 1) / 2], w[i][k], 1.0) -
                       bilinear(v[i][k], w[i][k], 1.0);

  std::vector<std::vector<VarId>> blocks;
  for (int i = 1; i <= N; ++i)
    blocks.emplace_back(v[i].begin() + 1, v[i].end());
  blocks.push_back({w_root});
  if (N >= 2) blocks.push_back({g[1], g[2]});
  for (int i = 2; i <= N; ++i) blocks.emplace_back(w[i].begin() + 1, w[i].end());

  Partition partition(std::move(blocks), m.names.size());
  return {std::move(m), std::move(partition), opts};
}

}  // namespace adeq
