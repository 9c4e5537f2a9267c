#include "rp/pooling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "rp/wl.hpp"

namespace rp {

namespace {

// Per-coordinate compensated (Kahan) accumulation so pooled values do not
// depend on enumeration order beyond ~1e-15.
class KahanVec {
 public:
  void add(const std::vector<double>& x) {
    if (sum_.empty() && count_ == 0) {
      sum_.assign(x.size(), 0.0);
      comp_.assign(x.size(), 0.0);
    }
    if (x.size() != sum_.size())
      throw DimensionError("pooled function output width changed between terms");
    for (std::size_t i = 0; i < x.size(); ++i) {
      double y = x[i] - comp_[i];
      double t = sum_[i] + y;
      comp_[i] = (t - sum_[i]) - y;
      sum_[i] = t;
    }
    ++count_;
  }

  // A term known to be the zero vector; width resolves on the first real add.
  void add_zero() { ++zeros_; }

  std::vector<double> mean() const {
    if (count_ == 0 && zeros_ == 0) throw UsageError("pooled average over zero terms");
    if (count_ == 0)
      throw UsageError("every pooled term was skipped; output width is unknowable");
    std::vector<double> out(sum_);
    const double inv = 1.0 / static_cast<double>(count_ + zeros_);
    for (double& t : out) t *= inv;
    return out;
  }

  long long terms() const { return count_ + zeros_; }

 private:
  std::vector<double> sum_, comp_;
  long long count_ = 0;
  long long zeros_ = 0;
};

double ce_from_logits(const std::vector<double>& z, int label) {
  if (label < 0 || label >= static_cast<int>(z.size()))
    throw DataError("cross-entropy label out of range");
  double m = z[0];
  for (double t : z) m = std::max(m, t);
  double sum = 0.0;
  for (double t : z) sum += std::exp(t - m);
  return m + std::log(sum) - z[static_cast<std::size_t>(label)];
}

const char* strategy_name(RpStrategy s) {
  switch (s) {
    case RpStrategy::exact: return "exact";
    case RpStrategy::pi_sgd: return "pi_sgd";
    case RpStrategy::dfs_orient: return "dfs_orient";
    case RpStrategy::bfs_orient: return "bfs_orient";
  }
  throw UsageError("unknown strategy value");
}

RpStrategy strategy_from_name(const std::string& s) {
  if (s == "exact") return RpStrategy::exact;
  if (s == "pi_sgd") return RpStrategy::pi_sgd;
  if (s == "dfs_orient") return RpStrategy::dfs_orient;
  if (s == "bfs_orient") return RpStrategy::bfs_orient;
  throw ConfigError("unknown pooling strategy: " + s);
}

}  // namespace

long long falling_factorial(int n, int k) {
  long long r = 1;
  for (int i = 0; i < k; ++i) {
    r *= n - i;
    if (r > kTupleGuard && r > kJointGuard) return r;  // beyond every guard; stop before overflow
  }
  return r;
}

void RpConfig::validate(int n) const {
  if (inference_samples < 0) throw ConfigError("inference_samples must be non-negative");
  if (id_modulus != 0 && (id_modulus < 1 || id_modulus > n))
    throw ConfigError("id_modulus must lie in [1, n]");
  if (k_ary != 0 && (k_ary < 1 || k_ary > n)) throw ConfigError("k_ary must lie in [1, n]");
  if (strategy == RpStrategy::exact) {
    if (k_ary == 0) {
      if (falling_factorial(n, n) > kJointGuard)
        throw SizeError("exact pooling is guarded to n <= 9; use pi_sgd or k-ary pooling");
    } else if (falling_factorial(n, k_ary) > kTupleGuard) {
      throw SizeError("exact k-ary pooling is guarded to n!/(n-k)! <= 10^6");
    }
  }
}

std::string rp_config_to_json_text(const RpConfig& cfg) {
  nlohmann::json j{{"strategy", strategy_name(cfg.strategy)},
                   {"k_ary", cfg.k_ary},
                   {"id_modulus", cfg.id_modulus},
                   {"inference_samples", cfg.inference_samples},
                   {"seed", cfg.seed}};
  return j.dump(2);
}

RpConfig rp_config_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad pooling config JSON: ") + e.what());
  }
  RpConfig cfg;
  try {
    cfg.strategy = strategy_from_name(j.at("strategy").get<std::string>());
    cfg.k_ary = j.value("k_ary", 0);
    cfg.id_modulus = j.value("id_modulus", 0);
    cfg.inference_samples = j.value("inference_samples", 5);
    cfg.seed = j.value("seed", static_cast<std::uint64_t>(0));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad pooling config JSON: ") + e.what());
  }
  return cfg;
}

std::vector<double> rp_exact_joint(const Graph& g, const FArrow& f) {
  if (falling_factorial(g.n, g.n) > kJointGuard)
    throw SizeError("exact pooling is guarded to n <= 9; use pi_sgd or k-ary pooling");
  std::vector<int> m(static_cast<std::size_t>(g.n));
  std::iota(m.begin(), m.end(), 0);
  KahanVec acc;
  do {
    acc.add(f(permute(g, Permutation(m))));
  } while (std::next_permutation(m.begin(), m.end()));
  return acc.mean();
}

BipartiteGraph BipartiteGraph::zeros(int n_rows, int n_cols, int d_e, int d_vr, int d_vc) {
  if (n_rows < 0 || n_cols < 0 || d_e < 0 || d_vr < 0 || d_vc < 0)
    throw ParameterError("negative bipartite dimensions");
  BipartiteGraph g;
  g.n_rows = n_rows;
  g.n_cols = n_cols;
  g.d_e = d_e;
  g.d_vr = d_vr;
  g.d_vc = d_vc;
  g.adj.assign(static_cast<std::size_t>(n_rows) * n_cols * (1 + d_e), 0.0);
  g.rfeat.assign(static_cast<std::size_t>(n_rows) * d_vr, 0.0);
  g.cfeat.assign(static_cast<std::size_t>(n_cols) * d_vc, 0.0);
  return g;
}

BipartiteGraph permute_bipartite(const BipartiteGraph& g, const Permutation& rows,
                                 const Permutation& cols) {
  if (rows.size() != g.n_rows || cols.size() != g.n_cols)
    throw DimensionError("bipartite permutation sizes do not match parts");
  BipartiteGraph out = BipartiteGraph::zeros(g.n_rows, g.n_cols, g.d_e, g.d_vr, g.d_vc);
  for (int i = 0; i < g.n_rows; ++i)
    for (int j = 0; j < g.n_cols; ++j)
      for (int k = 0; k <= g.d_e; ++k) out.at(rows(i), cols(j), k) = g.at(i, j, k);
  for (int i = 0; i < g.n_rows; ++i)
    for (int l = 0; l < g.d_vr; ++l)
      out.rfeat[static_cast<std::size_t>(rows(i)) * g.d_vr + l] =
          g.rfeat[static_cast<std::size_t>(i) * g.d_vr + l];
  for (int j = 0; j < g.n_cols; ++j)
    for (int l = 0; l < g.d_vc; ++l)
      out.cfeat[static_cast<std::size_t>(cols(j)) * g.d_vc + l] =
          g.cfeat[static_cast<std::size_t>(j) * g.d_vc + l];
  return out;
}

std::vector<double> rp_exact_separate(const BipartiteGraph& g, const FArrowBi& f) {
  const long long fr = falling_factorial(g.n_rows, g.n_rows);
  const long long fc = falling_factorial(g.n_cols, g.n_cols);
  if (fr > kTupleGuard || fc > kTupleGuard || fr * fc > kTupleGuard)
    throw SizeError("separate pooling is guarded to n_rows! * n_cols! <= 10^6");
  std::vector<int> rm(static_cast<std::size_t>(g.n_rows));
  std::iota(rm.begin(), rm.end(), 0);
  KahanVec acc;
  do {
    Permutation pr{std::vector<int>(rm)};
    std::vector<int> cm(static_cast<std::size_t>(g.n_cols));
    std::iota(cm.begin(), cm.end(), 0);
    do {
      acc.add(f(permute_bipartite(g, pr, Permutation(cm))));
    } while (std::next_permutation(cm.begin(), cm.end()));
  } while (std::next_permutation(rm.begin(), rm.end()));
  return acc.mean();
}

long long rp_gnn_pattern_count(int n, int modulus) {
  if (modulus < 1 || modulus > std::max(n, 1)) throw ParameterError("id modulus must lie in [1, n]");
  std::vector<long long> q(static_cast<std::size_t>(modulus), 0);
  for (int i = 0; i < n; ++i) ++q[static_cast<std::size_t>(i % modulus)];
  // multinomial n! / prod q_c! as a product of binomials, clamped once it
  // exceeds every guard (exact values that large are never needed)
  __int128 result = 1;
  long long remaining = n;
  for (long long qc : q) {
    __int128 binom = 1;
    for (long long j = 1; j <= qc; ++j) {
      binom = binom * static_cast<__int128>(remaining - qc + j) / j;
      if (result * binom > static_cast<__int128>(4) * kJointGuard * kJointGuard)
        return kJointGuard + 1;
    }
    result *= binom;
    remaining -= qc;
  }
  return static_cast<long long>(result);
}

Mat augmented_id_features(const Graph& g, const Permutation& p, int modulus) {
  if (p.size() != g.n) throw DimensionError("permutation size does not match vertex count");
  if (modulus < 1 || modulus > g.n) throw ParameterError("id modulus must lie in [1, n]");
  Mat x(g.n, g.d_v + modulus);
  for (int i = 0; i < g.n; ++i) {
    for (int l = 0; l < g.d_v; ++l) x(i, l) = g.feat(i, l);
    x(i, g.d_v + p(i) % modulus) = 1.0;
  }
  return x;
}

namespace {

// Shared enumeration over the distinct id-assignment patterns: orderings of
// the multiset {i mod m : i in V}. Every pattern is induced by the same
// number of permutations, so a uniform average over patterns equals the
// uniform average over all n! permutations.
std::vector<double> pooled_gnn_core(const Graph& g, const GinModel& model, int modulus,
                                    bool want_logits) {
  if (modulus < 1 || modulus > g.n) throw ParameterError("id modulus must lie in [1, n]");
  if (rp_gnn_pattern_count(g.n, modulus) > kJointGuard)
    throw SizeError("id-pattern enumeration is guarded to 9! patterns; reduce n or the modulus");
  AdjListPtr adj = adjacency_list(g);
  std::vector<int> pattern(static_cast<std::size_t>(g.n));
  for (int i = 0; i < g.n; ++i) pattern[i] = i % modulus;
  std::sort(pattern.begin(), pattern.end());
  KahanVec acc;
  do {
    Mat x(g.n, g.d_v + modulus);
    for (int i = 0; i < g.n; ++i) {
      for (int l = 0; l < g.d_v; ++l) x(i, l) = g.feat(i, l);
      x(i, g.d_v + pattern[i]) = 1.0;
    }
    GinForward fw = gin_forward(adj, x, model);
    acc.add(want_logits ? fw.logits.value().v : fw.graph_embedding.value().v);
  } while (std::next_permutation(pattern.begin(), pattern.end()));
  return acc.mean();
}

}  // namespace

std::vector<double> rp_gnn_exact(const Graph& g, const GinModel& model, int modulus) {
  return pooled_gnn_core(g, model, modulus, false);
}

std::vector<double> rp_gnn_exact_logits(const Graph& g, const GinModel& model, int modulus) {
  return pooled_gnn_core(g, model, modulus, true);
}

std::vector<double> pi_sgd_sample(const Graph& g, const FArrow& f, const Permutation& s) {
  return f(permute(g, s));
}

std::vector<double> pi_sgd_sample(const Graph& g, const FArrow& f, Rng& rng) {
  return pi_sgd_sample(g, f, Permutation::random(g.n, rng));
}

Var rp_batch_loss(const std::vector<TrainExample>& batch, const std::vector<Permutation>& perms,
                  const GinModel& model, int id_modulus) {
  if (batch.empty()) throw UsageError("training batch is empty");
  if (perms.size() != batch.size())
    throw DimensionError("one permutation per batch example is required");
  std::vector<Var> losses;
  losses.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const TrainExample& ex = batch[i];
    if (!ex.graph) throw UsageError("training example holds no graph");
    GinForward fw;
    if (id_modulus > 0) {
      AdjListPtr adj = ex.adj ? ex.adj : adjacency_list(*ex.graph);
      fw = gin_forward(adj, augmented_id_features(*ex.graph, perms[i], id_modulus), model);
    } else {
      Graph pg = permute(*ex.graph, perms[i]);
      fw = gin_forward(adjacency_list(pg), feature_matrix(pg), model);
    }
    losses.push_back(softmax_cross_entropy(fw.logits, ex.label));
  }
  return mean_all(losses);
}

double pi_sgd_train_step(const std::vector<TrainExample>& batch, GinModel& model,
                         const AdamConfig& adam, int id_modulus, Rng& rng) {
  if (batch.empty()) throw UsageError("training batch is empty");
  std::vector<Permutation> perms;
  perms.reserve(batch.size());
  for (const TrainExample& ex : batch) {
    if (!ex.graph) throw UsageError("training example holds no graph");
    perms.push_back(Permutation::random(ex.graph->n, rng));
  }
  Var loss = rp_batch_loss(batch, perms, model, id_modulus);
  model.store.zero_grads();
  backward(loss);
  model.store.adam_step(adam);
  return loss.value().v[0];
}

double rp_exact_loss(const Graph& g, int label, const GinModel& model, int modulus, RhoMode rho) {
  if (rho == RhoMode::pool_logits)
    return ce_from_logits(rp_gnn_exact_logits(g, model, modulus), label);
  std::vector<double> emb = rp_gnn_exact(g, model, modulus);
  const Mat& w = model.head.value();
  if (static_cast<int>(emb.size()) != w.rows)
    throw DimensionError("pooled embedding width does not match the head");
  std::vector<double> z(static_cast<std::size_t>(w.cols), 0.0);
  for (int i = 0; i < w.rows; ++i)
    for (int j = 0; j < w.cols; ++j) z[j] += emb[i] * w(i, j);
  return ce_from_logits(z, label);
}

double rp_surrogate_loss(const Graph& g, int label, const GinModel& model, int modulus) {
  if (modulus < 1 || modulus > g.n) throw ParameterError("id modulus must lie in [1, n]");
  if (rp_gnn_pattern_count(g.n, modulus) > kJointGuard)
    throw SizeError("id-pattern enumeration is guarded to 9! patterns; reduce n or the modulus");
  AdjListPtr adj = adjacency_list(g);
  std::vector<int> pattern(static_cast<std::size_t>(g.n));
  for (int i = 0; i < g.n; ++i) pattern[i] = i % modulus;
  std::sort(pattern.begin(), pattern.end());
  KahanVec acc;
  do {
    Mat x(g.n, g.d_v + modulus);
    for (int i = 0; i < g.n; ++i) {
      for (int l = 0; l < g.d_v; ++l) x(i, l) = g.feat(i, l);
      x(i, g.d_v + pattern[i]) = 1.0;
    }
    GinForward fw = gin_forward(adj, x, model);
    acc.add({ce_from_logits(fw.logits.value().v, label)});
  } while (std::next_permutation(pattern.begin(), pattern.end()));
  return acc.mean()[0];
}

std::vector<double> rp_inference(const Graph& g, const FArrow& f, int samples, Rng& rng) {
  if (samples < 0) throw ParameterError("sample count must be non-negative");
  if (samples == 0) return rp_exact_joint(g, f);
  KahanVec acc;
  for (int s = 0; s < samples; ++s) acc.add(pi_sgd_sample(g, f, rng));
  return acc.mean();
}

namespace {

bool has_isolated_vertex(const Graph& g) {
  for (int u = 0; u < g.n; ++u)
    if (g.degree(u) == 0) return true;
  return false;
}

void enumerate_tuples(const Graph& g, const FArrow& f, int k, bool skip_isolated,
                      std::vector<int>& tuple, std::vector<char>& used, KahanVec& acc) {
  if (static_cast<int>(tuple.size()) == k) {
    Graph sub = induced_subgraph(g, tuple);
    if (skip_isolated && has_isolated_vertex(sub))
      acc.add_zero();
    else
      acc.add(f(sub));
    return;
  }
  for (int v = 0; v < g.n; ++v) {
    if (used[v]) continue;
    used[v] = 1;
    tuple.push_back(v);
    enumerate_tuples(g, f, k, skip_isolated, tuple, used, acc);
    tuple.pop_back();
    used[v] = 0;
  }
}

}  // namespace

std::vector<double> kary_rp(const Graph& g, const FArrow& f, int k, KaryMode mode,
                            long long budget, Rng* rng, bool skip_isolated) {
  if (k < 1 || k > g.n) throw ParameterError("k must lie in [1, n]");
  KahanVec acc;
  if (mode == KaryMode::exact) {
    if (falling_factorial(g.n, k) > kTupleGuard)
      throw SizeError("exact k-ary pooling is guarded to n!/(n-k)! <= 10^6");
    std::vector<int> tuple;
    std::vector<char> used(static_cast<std::size_t>(g.n), 0);
    enumerate_tuples(g, f, k, skip_isolated, tuple, used, acc);
  } else {
    if (budget < 1) throw ParameterError("sampled k-ary pooling needs a positive budget");
    if (!rng) throw UsageError("sampled k-ary pooling needs an rng");
    std::vector<int> pool(static_cast<std::size_t>(g.n));
    std::iota(pool.begin(), pool.end(), 0);
    for (long long b = 0; b < budget; ++b) {
      for (int t = 0; t < k; ++t) {
        int j = t + static_cast<int>(rng->below(static_cast<std::uint64_t>(g.n - t)));
        std::swap(pool[t], pool[j]);
      }
      std::vector<int> tuple(pool.begin(), pool.begin() + k);
      Graph sub = induced_subgraph(g, tuple);
      if (skip_isolated && has_isolated_vertex(sub))
        acc.add_zero();
      else
        acc.add(f(sub));
    }
  }
  return acc.mean();
}

Permutation orient(const Graph& g, TraversalMode mode, int start) {
  if (start < 0 || start >= g.n) throw ParameterError("start vertex out of range");
  // relabel-invariant tie-break key: (stable refinement color, label)
  Coloring coloring = wl_refine(g);
  auto key_less = [&](int a, int b) {
    if (coloring.colors[a] != coloring.colors[b]) return coloring.colors[a] < coloring.colors[b];
    return a < b;
  };

  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(g.n));
  std::vector<char> seen(static_cast<std::size_t>(g.n), 0);

  auto visit_component = [&](int src) {
    if (mode == TraversalMode::dfs) {
      std::vector<int> stack{src};
      while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        if (seen[u]) continue;
        seen[u] = 1;
        order.push_back(u);
        std::vector<int> nbr = g.neighbors(u);
        std::sort(nbr.begin(), nbr.end(), key_less);
        for (auto it = nbr.rbegin(); it != nbr.rend(); ++it)  // smallest key pops first
          if (!seen[*it]) stack.push_back(*it);
      }
    } else {
      std::vector<int> queue{src};
      seen[src] = 1;
      for (std::size_t head = 0; head < queue.size(); ++head) {
        int u = queue[head];
        order.push_back(u);
        std::vector<int> nbr = g.neighbors(u);
        std::sort(nbr.begin(), nbr.end(), key_less);
        for (int v : nbr)
          if (!seen[v]) {
            seen[v] = 1;
            queue.push_back(v);
          }
      }
    }
  };

  visit_component(start);
  while (static_cast<int>(order.size()) < g.n) {
    int next = -1;
    for (int v = 0; v < g.n; ++v)
      if (!seen[v] && (next == -1 || key_less(v, next))) next = v;
    visit_component(next);
  }

  std::vector<int> m(static_cast<std::size_t>(g.n));
  for (int t = 0; t < g.n; ++t) m[static_cast<std::size_t>(order[t])] = t;
  return Permutation(std::move(m));
}

Graph kary_traversal_sample(const Graph& g, int k, TraversalMode mode, Rng& rng) {
  if (k < 1 || k > g.n) throw ParameterError("k must lie in [1, n]");
  const int start = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.n)));
  Permutation p = orient(g, mode, start);
  std::vector<int> visit(static_cast<std::size_t>(g.n));
  for (int v = 0; v < g.n; ++v) visit[static_cast<std::size_t>(p(v))] = v;
  return induced_subgraph(g, std::vector<int>(visit.begin(), visit.begin() + k));
}

}  // namespace rp
