#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rp/gin.hpp"
#include "rp/graph.hpp"

namespace rp {

// Permutation-sensitive graph function being pooled.
using FArrow = std::function<std::vector<double>(const Graph&)>;

enum class RpStrategy { exact, pi_sgd, dfs_orient, bfs_orient };

struct RpConfig {
  RpStrategy strategy = RpStrategy::pi_sgd;
  int k_ary = 0;       // 0 = pool over whole-graph orderings
  int id_modulus = 0;  // 0 = no one-hot id augmentation
  int inference_samples = 5;
  std::uint64_t seed = 0;

  void validate(int n) const;
};
std::string rp_config_to_json_text(const RpConfig& cfg);
RpConfig rp_config_from_json_text(const std::string& text);

// Enumeration guards.
inline constexpr long long kJointGuard = 362880;  // 9!
inline constexpr long long kTupleGuard = 1000000;
// n (n-1) ... (n-k+1), clamped to guard+1 on overflow.
long long falling_factorial(int n, int k);

// Exact pooled value (1/n!) sum_pi f(permute(g, pi)); compensated summation,
// guarded to n <= 9.
std::vector<double> rp_exact_joint(const Graph& g, const FArrow& f);

// Rectangular array with separate row/column vertex sets.
struct BipartiteGraph {
  int n_rows = 0, n_cols = 0;
  int d_e = 0, d_vr = 0, d_vc = 0;
  std::vector<double> adj;  // (i*n_cols + j)*(1+d_e) + k
  std::vector<double> rfeat, cfeat;

  static BipartiteGraph zeros(int n_rows, int n_cols, int d_e, int d_vr, int d_vc);
  double at(int i, int j, int k) const {
    return adj[(static_cast<std::size_t>(i) * n_cols + j) * (1 + d_e) + k];
  }
  double& at(int i, int j, int k) {
    return adj[(static_cast<std::size_t>(i) * n_cols + j) * (1 + d_e) + k];
  }
  bool operator==(const BipartiteGraph&) const = default;
};
using FArrowBi = std::function<std::vector<double>(const BipartiteGraph&)>;

BipartiteGraph permute_bipartite(const BipartiteGraph& g, const Permutation& rows,
                                 const Permutation& cols);

// Pool over independent row and column orderings; guarded to
// n_rows! * n_cols! <= 10^6.
std::vector<double> rp_exact_separate(const BipartiteGraph& g, const FArrowBi& f);

// Exact pooled GNN embedding with one-hot ids: keeps adjacency and raw
// features fixed and enumerates only the distinct id-assignment patterns a
// permutation can induce (all orderings of the multiset {i mod m}), each of
// which stands for the same number of permutations. Guarded by the pattern
// count (n!/prod_c count_c!) <= 9!.
std::vector<double> rp_gnn_exact(const Graph& g, const GinModel& model, int modulus);
std::vector<double> rp_gnn_exact_logits(const Graph& g, const GinModel& model, int modulus);
long long rp_gnn_pattern_count(int n, int modulus);

// Feature matrix [X | onehot(p(i) mod modulus)] without copying the graph.
Mat augmented_id_features(const Graph& g, const Permutation& p, int modulus);

// Single-permutation estimator of rp_exact_joint.
std::vector<double> pi_sgd_sample(const Graph& g, const FArrow& f, Rng& rng);
std::vector<double> pi_sgd_sample(const Graph& g, const FArrow& f, const Permutation& s);

struct TrainExample {
  const Graph* graph = nullptr;
  int label = 0;
  AdjListPtr adj;  // optional cache; built on demand when null
};

// Mean cross-entropy of the model over the batch at explicit per-example
// permutations. id_modulus > 0 uses the fixed-graph form (ids permuted);
// id_modulus == 0 permutes the graph itself and uses raw features.
Var rp_batch_loss(const std::vector<TrainExample>& batch, const std::vector<Permutation>& perms,
                  const GinModel& model, int id_modulus);

// One stochastic update: one fresh uniform permutation per example, mean
// cross-entropy, backprop, Adam step. Returns the loss value.
double pi_sgd_train_step(const std::vector<TrainExample>& batch, GinModel& model,
                         const AdamConfig& adam, int id_modulus, Rng& rng);

// Where the classifier head sits relative to pooling: pool embeddings and
// apply the head outside (default), or push the head inside and pool logits.
enum class RhoMode { pool_embeddings, pool_logits };

// Cross-entropy at the exactly pooled representation (the objective the
// stochastic surrogate upper-bounds).
double rp_exact_loss(const Graph& g, int label, const GinModel& model, int modulus, RhoMode rho);
// Surrogate objective: mean cross-entropy over the enumerated orderings
// (the full head runs inside every term, so no rho choice arises).
double rp_surrogate_loss(const Graph& g, int label, const GinModel& model, int modulus);

// Mean of f over `samples` uniform orderings; samples == 0 computes the
// exact average (guard applies).
std::vector<double> rp_inference(const Graph& g, const FArrow& f, int samples, Rng& rng);

enum class KaryMode { exact, sampled };

// Pool f over ordered k-tuples of distinct vertices (induced subgraphs in
// tuple order): exact mode enumerates all n!/(n-k)! tuples, sampled mode
// draws `budget` uniform tuples. skip_isolated treats f as zero on
// subgraphs containing an isolated vertex, without evaluating f.
std::vector<double> kary_rp(const Graph& g, const FArrow& f, int k, KaryMode mode,
                            long long budget = 0, Rng* rng = nullptr, bool skip_isolated = false);

enum class TraversalMode { dfs, bfs };

// Traversal orientation: permutation sending the t-th visited vertex to
// position t. Neighbor ties break on (stable refinement color, label), so
// relabeling a graph cannot change which structural branch is explored
// first; on disconnected graphs the search restarts at the smallest-keyed
// unvisited vertex.
Permutation orient(const Graph& g, TraversalMode mode, int start);

// Random-start truncated traversal: induced subgraph on the first k visited
// vertices, in visit order.
Graph kary_traversal_sample(const Graph& g, int k, TraversalMode mode, Rng& rng);

}  // namespace rp
