#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "rp/gin.hpp"
#include "rp/graph.hpp"
#include "rp/nn.hpp"
#include "rp/pooling.hpp"
#include "rp/rng.hpp"

namespace rptest {

inline rp::Graph path_graph(int n) {
  rp::Graph g = rp::Graph::zeros(n, 0, 1);
  for (int i = 0; i < n; ++i) g.feat(i, 0) = 1.0;
  for (int i = 0; i + 1 < n; ++i) g.add_undirected_edge(i, i + 1);
  return g;
}

inline rp::Graph cycle_graph(int n) {
  rp::Graph g = rp::Graph::zeros(n, 0, 1);
  for (int i = 0; i < n; ++i) g.feat(i, 0) = 1.0;
  for (int i = 0; i < n; ++i) g.add_undirected_edge(i, (i + 1) % n);
  return g;
}

inline rp::Graph star_graph(int leaves) {
  rp::Graph g = rp::Graph::zeros(leaves + 1, 0, 1);
  for (int i = 0; i <= leaves; ++i) g.feat(i, 0) = 1.0;
  for (int i = 1; i <= leaves; ++i) g.add_undirected_edge(0, i);
  return g;
}

inline rp::Graph triangle_graph() { return cycle_graph(3); }

inline rp::Graph random_graph(int n, double edge_prob, int d_e, int d_v, rp::Rng& rng) {
  rp::Graph g = rp::Graph::zeros(n, d_e, d_v);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < d_v; ++l) g.feat(i, l) = rng.uniform(-1.0, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < edge_prob) {
        std::vector<double> ef;
        for (int k = 0; k < d_e; ++k) ef.push_back(rng.uniform(-1.0, 1.0));
        g.add_undirected_edge(i, j, ef);
      }
  return g;
}

// Uniform random recursive tree: vertex i attaches to a uniform earlier vertex.
inline rp::Graph random_tree(int n, rp::Rng& rng) {
  rp::Graph g = rp::Graph::zeros(n, 0, 1);
  for (int i = 0; i < n; ++i) g.feat(i, 0) = 1.0;
  for (int i = 1; i < n; ++i)
    g.add_undirected_edge(i, static_cast<int>(rng.below(static_cast<std::uint64_t>(i))));
  return g;
}

// Deterministic coefficient in [-1, 1] keyed by (seed, j, i).
inline double seeded_coef(std::uint64_t seed, std::uint64_t j, std::uint64_t i) {
  return 2.0 * (static_cast<double>(rp::derive_seed(seed, j, i) >> 11) * 0x1.0p-53) - 1.0;
}

// Permutation-sensitive nonlinear graph function driven by the flattened
// tensor; works for any graph size.
inline rp::FArrow seeded_nonlinear_f(std::uint64_t seed, int out_dim = 3) {
  return [seed, out_dim](const rp::Graph& g) {
    std::vector<double> flat = rp::vec(g);
    std::vector<double> out(static_cast<std::size_t>(out_dim));
    for (int j = 0; j < out_dim; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < flat.size(); ++i)
        acc += seeded_coef(seed, static_cast<std::uint64_t>(j), i) * flat[i];
      out[static_cast<std::size_t>(j)] = std::tanh(acc);
    }
    return out;
  };
}

inline double rel_err(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return 1e300;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

// Central finite-difference check of every parameter gradient against one
// backward pass; build_loss must rebuild the forward graph from the store's
// current values each call.
inline double max_grad_rel_err(rp::ParamStore& store, const std::function<rp::Var()>& build_loss,
                               double h = 1e-5, double floor = 1e-6) {
  store.zero_grads();
  rp::Var loss = build_loss();
  rp::backward(loss);
  double worst = 0.0;
  for (auto entry : store.entries()) {
    rp::Var param = entry.second;
    const rp::Mat analytic = param.grad();
    rp::Mat& w = param.value_mut();
    for (std::size_t i = 0; i < w.v.size(); ++i) {
      const double orig = w.v[i];
      w.v[i] = orig + h;
      const double lp = build_loss().value().v[0];
      w.v[i] = orig - h;
      const double lm = build_loss().value().v[0];
      w.v[i] = orig;
      const double fd = (lp - lm) / (2.0 * h);
      worst = std::max(worst, rel_err(fd, analytic.v[i], floor));
    }
  }
  store.zero_grads();
  return worst;
}

}  // namespace rptest
