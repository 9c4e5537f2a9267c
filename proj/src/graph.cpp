#include "rp/graph.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace rp {

Permutation::Permutation(std::vector<int> map) : map_(std::move(map)) {
  std::vector<char> seen(map_.size(), 0);
  for (int v : map_) {
    if (v < 0 || v >= static_cast<int>(map_.size()) || seen[v])
      throw ParameterError("permutation map is not a bijection on {0..n-1}");
    seen[v] = 1;
  }
}

Permutation Permutation::identity(int n) {
  std::vector<int> m(static_cast<std::size_t>(n));
  std::iota(m.begin(), m.end(), 0);
  return Permutation(std::move(m));
}

Permutation Permutation::random(int n, Rng& rng) {
  std::vector<int> m(static_cast<std::size_t>(n));
  std::iota(m.begin(), m.end(), 0);
  rng.shuffle(m);
  return Permutation(std::move(m));
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(map_.size());
  for (int i = 0; i < size(); ++i) inv[static_cast<std::size_t>(map_[i])] = i;
  return Permutation(std::move(inv));
}

Permutation compose(const Permutation& outer, const Permutation& inner) {
  if (outer.size() != inner.size())
    throw DimensionError("composed permutations must have equal size");
  std::vector<int> m(static_cast<std::size_t>(inner.size()));
  for (int i = 0; i < inner.size(); ++i) m[i] = outer(inner(i));
  return Permutation(std::move(m));
}

Graph Graph::zeros(int n, int d_e, int d_v) {
  if (n < 0 || d_e < 0 || d_v < 0) throw ParameterError("negative graph dimensions");
  Graph g;
  g.n = n;
  g.d_e = d_e;
  g.d_v = d_v;
  g.adj.assign(static_cast<std::size_t>(n) * n * (1 + d_e), 0.0);
  g.vfeat.assign(static_cast<std::size_t>(n) * d_v, 0.0);
  return g;
}

void Graph::add_undirected_edge(int i, int j, const std::vector<double>& efeat) {
  if (i < 0 || i >= n || j < 0 || j >= n) throw ParameterError("edge endpoint out of range");
  if (static_cast<int>(efeat.size()) != d_e)
    throw DimensionError("edge feature width does not match d_e");
  at(i, j, 0) = 1.0;
  at(j, i, 0) = 1.0;
  for (int k = 0; k < d_e; ++k) {
    at(i, j, k + 1) = efeat[k];
    at(j, i, k + 1) = efeat[k];
  }
}

std::vector<int> Graph::neighbors(int u) const {
  std::vector<int> out;
  for (int v = 0; v < n; ++v)
    if (at(u, v, 0) == 1.0) out.push_back(v);
  return out;
}

int Graph::degree(int u) const { return static_cast<int>(neighbors(u).size()); }

long long Graph::undirected_edge_count() const {
  long long c = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      if (at(i, j, 0) == 1.0) ++c;
  return c;
}

bool Graph::edge_symmetric() const {
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k <= d_e; ++k)
        if (at(i, j, k) != at(j, i, k)) return false;
  return true;
}

Graph permute(const Graph& g, const Permutation& p) {
  if (p.size() != g.n) throw DimensionError("permutation size does not match vertex count");
  Graph out = Graph::zeros(g.n, g.d_e, g.d_v);
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k <= g.d_e; ++k) out.at(p(i), p(j), k) = g.at(i, j, k);
    for (int l = 0; l < g.d_v; ++l) out.feat(p(i), l) = g.feat(i, l);
  }
  return out;
}

std::vector<double> vec(const Graph& g) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(g.n) * (static_cast<std::size_t>(g.n) * (1 + g.d_e) + g.d_v));
  for (int i = 0; i < g.n; ++i) {
    for (int j = 0; j < g.n; ++j)
      for (int k = 0; k <= g.d_e; ++k) out.push_back(g.at(i, j, k));
    for (int l = 0; l < g.d_v; ++l) out.push_back(g.feat(i, l));
  }
  return out;
}

Graph make_csl(const CslParams& params) {
  const int m = params.m_vertices;
  const int r = params.r_skip;
  if (m < 4) throw ParameterError("circulant skip graph needs at least 4 vertices");
  if (r < 2) throw ParameterError("skip stride below 2 collapses onto the cycle");
  if (r >= m - 1) throw ParameterError("skip stride must satisfy R < M - 1");
  if (std::gcd(m, r) != 1) throw ParameterError("skip stride must be co-prime with M");

  Graph g = Graph::zeros(m, 0, 1);
  for (int i = 0; i < m; ++i) g.feat(i, 0) = 1.0;
  for (int j = 0; j < m; ++j) g.add_undirected_edge(j, (j + 1) % m);
  // skip cycle: s_1 = 0, s_{i+1} = (s_i + R) mod M; co-primality closes it
  // after exactly M hops.
  int s = 0;
  for (int i = 0; i < m; ++i) {
    int t = (s + r) % m;
    g.add_undirected_edge(s, t);
    s = t;
  }
  for (int u = 0; u < m; ++u)
    if (g.degree(u) != 4) throw ParameterError("skip stride does not give a 4-regular graph");
  return g;
}

namespace {

bool extend_mapping(const Graph& a, const Graph& b, std::vector<int>& map,
                    std::vector<char>& used, int next) {
  if (next == a.n) return true;
  for (int cand = 0; cand < a.n; ++cand) {
    if (used[cand]) continue;
    bool ok = true;
    for (int l = 0; l < a.d_v && ok; ++l)
      if (a.feat(next, l) != b.feat(cand, l)) ok = false;
    for (int prev = 0; prev < next && ok; ++prev)
      for (int k = 0; k <= a.d_e && ok; ++k)
        if (a.at(next, prev, k) != b.at(cand, map[prev], k) ||
            a.at(prev, next, k) != b.at(map[prev], cand, k))
          ok = false;
    for (int k = 0; k <= a.d_e && ok; ++k)
      if (a.at(next, next, k) != b.at(cand, cand, k)) ok = false;
    if (!ok) continue;
    used[cand] = 1;
    map[next] = cand;
    if (extend_mapping(a, b, map, used, next + 1)) return true;
    used[cand] = 0;
  }
  return false;
}

}  // namespace

bool brute_force_isomorphic(const Graph& a, const Graph& b) {
  if (a.n > 12 || b.n > 12) throw SizeError("isomorphism search is guarded to n <= 12");
  if (a.n != b.n || a.d_e != b.d_e || a.d_v != b.d_v) return false;
  if (a.undirected_edge_count() != b.undirected_edge_count()) return false;
  std::vector<int> da, db;
  for (int u = 0; u < a.n; ++u) {
    da.push_back(a.degree(u));
    db.push_back(b.degree(u));
  }
  std::sort(da.begin(), da.end());
  std::sort(db.begin(), db.end());
  if (da != db) return false;

  std::vector<int> map(static_cast<std::size_t>(a.n), -1);
  std::vector<char> used(static_cast<std::size_t>(a.n), 0);
  return extend_mapping(a, b, map, used, 0);
}

Graph augment_onehot_ids(const Graph& g, const Permutation& p, int modulus) {
  if (p.size() != g.n) throw DimensionError("permutation size does not match vertex count");
  if (modulus < 1 || modulus > g.n) throw ParameterError("id modulus must lie in [1, n]");
  Graph out = Graph::zeros(g.n, g.d_e, g.d_v + modulus);
  out.adj = g.adj;
  for (int i = 0; i < g.n; ++i) {
    for (int l = 0; l < g.d_v; ++l) out.feat(i, l) = g.feat(i, l);
    out.feat(i, g.d_v + p(i) % modulus) = 1.0;
  }
  return out;
}

Graph induced_subgraph(const Graph& g, const std::vector<int>& vertices) {
  std::vector<char> seen(static_cast<std::size_t>(g.n), 0);
  for (int v : vertices) {
    if (v < 0 || v >= g.n) throw ParameterError("subgraph vertex out of range");
    if (seen[v]) throw ParameterError("subgraph vertex list has duplicates");
    seen[v] = 1;
  }
  const int k = static_cast<int>(vertices.size());
  Graph out = Graph::zeros(k, g.d_e, g.d_v);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j)
      for (int c = 0; c <= g.d_e; ++c) out.at(i, j, c) = g.at(vertices[i], vertices[j], c);
    for (int l = 0; l < g.d_v; ++l) out.feat(i, l) = g.feat(vertices[i], l);
  }
  return out;
}

Graph graph_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad graph JSON: ") + e.what());
  }
  try {
    Graph g = Graph::zeros(j.at("n").get<int>(), j.at("d_e").get<int>(), j.at("d_v").get<int>());
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 3) throw IoError("edge entries must be [i, j, [features]]");
      g.add_undirected_edge(e[0].get<int>(), e[1].get<int>(), e[2].get<std::vector<double>>());
    }
    auto vf = j.at("vfeat").get<std::vector<double>>();
    if (vf.size() != g.vfeat.size()) throw IoError("vfeat length does not match n * d_v");
    g.vfeat = std::move(vf);
    return g;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad graph JSON: ") + e.what());
  }
}

std::string graph_to_json_text(const Graph& g) {
  if (!g.edge_symmetric()) throw IoError("graph JSON stores undirected graphs; tensor is asymmetric");
  nlohmann::json edges = nlohmann::json::array();
  for (int i = 0; i < g.n; ++i)
    for (int j = i; j < g.n; ++j) {
      std::vector<double> ef;
      for (int k = 1; k <= g.d_e; ++k) ef.push_back(g.at(i, j, k));
      if (g.at(i, j, 0) == 1.0) {
        edges.push_back({i, j, ef});
      } else if (g.at(i, j, 0) != 0.0 ||
                 std::any_of(ef.begin(), ef.end(), [](double x) { return x != 0.0; })) {
        throw IoError("graph JSON cannot represent non-binary indicators or features off edges");
      }
    }
  nlohmann::json j{{"n", g.n}, {"d_e", g.d_e}, {"d_v", g.d_v}, {"edges", std::move(edges)},
                   {"vfeat", g.vfeat}};
  return j.dump(2);
}

Graph load_graph_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return graph_from_json_text(ss.str());
}

void save_graph_json(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write graph file: " + path);
  out << graph_to_json_text(g) << '\n';
}

}  // namespace rp
