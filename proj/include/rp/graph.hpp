#pragma once

#include <string>
#include <vector>

#include "rp/errors.hpp"
#include "rp/rng.hpp"

namespace rp {

// Bijection {0..n-1} -> {0..n-1}; map()[i] is the image of i.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> map);  // validates bijectivity

  static Permutation identity(int n);
  static Permutation random(int n, Rng& rng);

  int size() const { return static_cast<int>(map_.size()); }
  int operator()(int i) const { return map_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& map() const { return map_; }

  Permutation inverse() const;

  bool operator==(const Permutation&) const = default;

 private:
  std::vector<int> map_;
};

// compose(outer, inner)(i) = outer(inner(i))
Permutation compose(const Permutation& outer, const Permutation& inner);

// Attributed graph as a dense n x n x (1+d_e) tensor plus n x d_v vertex
// features. Slice k=0 is the 0/1 edge indicator; slices 1..d_e carry edge
// features. Undirected graphs keep the tensor symmetric in (i, j).
struct Graph {
  int n = 0;
  int d_e = 0;
  int d_v = 0;
  std::vector<double> adj;    // (i*n + j)*(1+d_e) + k
  std::vector<double> vfeat;  // row-major n x d_v

  static Graph zeros(int n, int d_e, int d_v);

  double at(int i, int j, int k) const {
    return adj[(static_cast<std::size_t>(i) * n + j) * (1 + d_e) + k];
  }
  double& at(int i, int j, int k) {
    return adj[(static_cast<std::size_t>(i) * n + j) * (1 + d_e) + k];
  }
  double feat(int i, int l) const { return vfeat[static_cast<std::size_t>(i) * d_v + l]; }
  double& feat(int i, int l) { return vfeat[static_cast<std::size_t>(i) * d_v + l]; }

  void add_undirected_edge(int i, int j, const std::vector<double>& efeat = {});

  std::vector<int> neighbors(int u) const;  // ascending labels, needs at(u,v,0)==1
  int degree(int u) const;
  long long undirected_edge_count() const;  // self-loops count once
  bool edge_symmetric() const;              // full-fiber symmetry check

  bool operator==(const Graph&) const = default;  // exact elementwise
};

// Relabeled copy: result.at(p(i), p(j), k) == g.at(i, j, k) and
// result vertex p(i) carries g's features of vertex i. Feature channels
// themselves are never permuted.
Graph permute(const Graph& g, const Permutation& p);

// Flatten to a single vector: for each vertex i, the adjacency fibers
// at(i, 0, .), at(i, 1, .), ... followed by that vertex's feature row.
// Length n * (n * (1 + d_e) + d_v).
std::vector<double> vec(const Graph& g);

// Circulant-with-skips graph family parameters: m_vertices cycle nodes,
// one skip cycle of stride r_skip.
struct CslParams {
  int m_vertices = 0;
  int r_skip = 0;
};

// 4-regular circulant skip graph: cycle edges {j, j+1 mod M} plus skip
// edges {s, s+R mod M}; d_e = 0, d_v = 1, constant feature 1.0.
// Requires gcd(M, R) == 1 and 2 <= R < M - 1.
Graph make_csl(const CslParams& params);

// Exact isomorphism by backtracking search with degree/feature pruning.
// Guarded to n <= 12.
bool brute_force_isomorphic(const Graph& a, const Graph& b);

// Widen vertex features with modulus one-hot id columns: vertex i gets the
// one-hot of p(i) mod modulus appended to its feature row. Adjacency and
// original features stay fixed. Requires 1 <= modulus <= g.n and p of size n.
Graph augment_onehot_ids(const Graph& g, const Permutation& p, int modulus);

// Induced subgraph on an ordered vertex list (entries distinct, in range).
// Equals the top-left block of permute(g, q) for any q placing the listed
// vertices first in order.
Graph induced_subgraph(const Graph& g, const std::vector<int>& vertices);

// JSON form: {"n": ..., "d_e": ..., "d_v": ..., "edges": [[i, j, [f...]], ...],
// "vfeat": [row-major]} with each undirected edge stored once (i <= j) and
// mirrored on load.
Graph graph_from_json_text(const std::string& text);
std::string graph_to_json_text(const Graph& g);
Graph load_graph_json(const std::string& path);
void save_graph_json(const Graph& g, const std::string& path);

}  // namespace rp
