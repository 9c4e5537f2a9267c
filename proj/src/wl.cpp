#include "rp/wl.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

namespace rp {

namespace {

std::string render_row(const Graph& g, int u) {
  std::string s;
  char buf[40];
  for (int l = 0; l < g.d_v; ++l) {
    std::snprintf(buf, sizeof buf, "%.17g,", g.feat(u, l));
    s += buf;
  }
  return s;
}

// Canonical relabel: sort the distinct signatures, id = rank. Keeps ids
// stable under vertex relabeling because the signature set is label-free.
template <class Sig>
std::vector<int> relabel(const std::vector<Sig>& sigs) {
  std::vector<Sig> uniq(sigs);
  std::sort(uniq.begin(), uniq.end());
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
  std::vector<int> colors(sigs.size());
  for (std::size_t u = 0; u < sigs.size(); ++u)
    colors[u] = static_cast<int>(
        std::lower_bound(uniq.begin(), uniq.end(), sigs[u]) - uniq.begin());
  return colors;
}

template <class Sig>
std::string dump_sorted(std::vector<Sig> sigs);

template <>
std::string dump_sorted<std::string>(std::vector<std::string> sigs) {
  std::sort(sigs.begin(), sigs.end());
  std::string out;
  for (auto& s : sigs) {
    out += s;
    out += ';';
  }
  return out;
}

template <>
std::string dump_sorted<std::vector<int>>(std::vector<std::vector<int>> sigs) {
  std::sort(sigs.begin(), sigs.end());
  std::string out;
  for (auto& s : sigs) {
    for (int v : s) {
      out += std::to_string(v);
      out += ',';
    }
    out += ';';
  }
  return out;
}

// Runs refinement; fills the coloring and optionally a per-round canonical
// transcript (sorted signature multisets, label-free).
Coloring refine_core(const Graph& g, int max_rounds, std::string* transcript) {
  if (max_rounds < 0) throw ParameterError("max_rounds must be non-negative");
  const int n = g.n;

  std::vector<std::string> init_sigs;
  init_sigs.reserve(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) init_sigs.push_back(render_row(g, u));

  Coloring out;
  out.colors = relabel(init_sigs);
  out.counts_per_round.push_back(out.colors.empty()
                                     ? 0
                                     : 1 + *std::max_element(out.colors.begin(), out.colors.end()));
  if (transcript) {
    *transcript += "r0:";
    *transcript += dump_sorted(std::move(init_sigs));
    *transcript += '\n';
  }

  std::vector<std::vector<int>> nbr(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u) nbr[u] = g.neighbors(u);

  for (int t = 1; t <= max_rounds; ++t) {
    std::vector<std::vector<int>> sigs(static_cast<std::size_t>(n));
    for (int u = 0; u < n; ++u) {
      auto& s = sigs[u];
      s.reserve(nbr[u].size() + 1);
      s.push_back(out.colors[u]);
      for (int v : nbr[u]) s.push_back(out.colors[v]);
      std::sort(s.begin() + 1, s.end());
    }
    if (transcript) {
      *transcript += "r" + std::to_string(t) + ":";
      *transcript += dump_sorted(sigs);
      *transcript += '\n';
    }
    int before = out.counts_per_round.back();
    out.colors = relabel(sigs);
    int after = out.colors.empty()
                    ? 0
                    : 1 + *std::max_element(out.colors.begin(), out.colors.end());
    out.rounds = t;
    out.counts_per_round.push_back(after);
    // signatures include the previous color, so the partition only ever
    // splits; an unchanged count means it is stable
    if (after == before) break;
  }
  return out;
}

}  // namespace

int Coloring::num_colors() const { return counts_per_round.back(); }

Coloring wl_refine(const Graph& g, int max_rounds) { return refine_core(g, max_rounds, nullptr); }

Coloring wl_refine(const Graph& g) { return refine_core(g, g.n, nullptr); }

std::string wl_fingerprint(const Graph& g) {
  std::string transcript;
  refine_core(g, g.n, &transcript);
  return transcript;
}

}  // namespace rp
