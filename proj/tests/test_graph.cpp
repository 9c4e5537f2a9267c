#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "rp/graph.hpp"
#include "test_util.hpp"

using namespace rp;
using namespace rptest;

namespace {

// 5-vertex example graph: edges {1,2},{1,3},{2,3},{3,4},{4,5},{3,5} in
// 1-based labels, with a distinguishing feature per edge slot.
Graph five_vertex_example(int d_e) {
  Graph g = Graph::zeros(5, d_e, 1);
  for (int i = 0; i < 5; ++i) g.feat(i, 0) = static_cast<double>(i + 1);
  const int edges[6][2] = {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}, {2, 4}};
  for (int e = 0; e < 6; ++e) {
    std::vector<double> ef;
    for (int k = 0; k < d_e; ++k) ef.push_back(10.0 * (e + 1) + k);
    g.add_undirected_edge(edges[e][0], edges[e][1], ef);
  }
  return g;
}

}  // namespace

TEST_CASE("permutation validates bijectivity") {
  CHECK_NOTHROW(Permutation({2, 0, 1}));
  CHECK_THROWS_AS(Permutation({0, 0, 1}), ParameterError);
  CHECK_THROWS_AS(Permutation({0, 3, 1}), ParameterError);
  CHECK_THROWS_AS(Permutation({-1, 0, 1}), ParameterError);
}

TEST_CASE("permutation inverse and composition round-trip") {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    Permutation p = Permutation::random(6, rng);
    CHECK(compose(p, p.inverse()) == Permutation::identity(6));
    CHECK(compose(p.inverse(), p) == Permutation::identity(6));
    CHECK(compose(p, p.inverse()).inverse() == Permutation::identity(6));
  }
}

TEST_CASE("identity permutation leaves a graph unchanged") {
  Rng rng(5);
  Graph g = random_graph(6, 0.5, 2, 3, rng);
  CHECK(permute(g, Permutation::identity(6)) == g);
}

TEST_CASE("permute relocates adjacency fibers and feature rows") {
  Graph g = five_vertex_example(1);
  // relabeling sending (1,2,3,4,5) -> (3,4,1,2,5) in 1-based terms
  Permutation p({2, 3, 0, 1, 4});
  Graph pg = permute(g, p);

  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j)
      for (int k = 0; k <= 1; ++k) CHECK(pg.at(p(i), p(j), k) == g.at(i, j, k));
    CHECK(pg.feat(p(i), 0) == g.feat(i, 0));
  }

  // spot-check: first two rows of the permuted tensor describe original
  // vertices 3 and 4 (1-based), which are adjacent
  CHECK(pg.at(0, 1, 0) == 1.0);
  CHECK(pg.at(0, 1, 1) == g.at(2, 3, 1));
  // original vertices 1 and 4 are not adjacent -> permuted (2, 1)
  CHECK(pg.at(2, 1, 0) == 0.0);

  CHECK(permute(pg, p.inverse()) == g);
}

TEST_CASE("permute rejects size mismatch") {
  Graph g = path_graph(4);
  CHECK_THROWS_AS(permute(g, Permutation::identity(3)), DimensionError);
}

TEST_CASE("vec follows row-fiber-then-features order") {
  Graph g = Graph::zeros(3, 1, 2);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k <= 1; ++k) g.at(i, j, k) = 100.0 * i + 10.0 * j + k;
  for (int i = 0; i < 3; ++i)
    for (int l = 0; l < 2; ++l) g.feat(i, l) = 1000.0 + 10.0 * i + l;

  std::vector<double> expect;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k <= 1; ++k) expect.push_back(100.0 * i + 10.0 * j + k);
    expect.push_back(1000.0 + 10.0 * i);
    expect.push_back(1000.0 + 10.0 * i + 1);
  }
  CHECK(vec(g) == expect);
  CHECK(vec(g).size() == 3u * (3u * 2u + 2u));
}

TEST_CASE("vec of a single vertex is adjacency fiber then features") {
  Graph g = Graph::zeros(1, 0, 1);
  g.feat(0, 0) = 7.0;
  CHECK(vec(g) == std::vector<double>{0.0, 7.0});
}

TEST_CASE("vec is permutation-sensitive") {
  Graph g = five_vertex_example(0);
  Permutation p({2, 3, 0, 1, 4});
  CHECK(vec(g) != vec(permute(g, p)));
}

TEST_CASE("circulant skip graph construction") {
  Graph g = make_csl({11, 2});
  CHECK(g.n == 11);
  CHECK(g.d_e == 0);
  CHECK(g.d_v == 1);
  CHECK(g.undirected_edge_count() == 22);
  CHECK(g.edge_symmetric());
  for (int u = 0; u < 11; ++u) {
    CHECK(g.degree(u) == 4);
    CHECK(g.feat(u, 0) == 1.0);
  }
  // cycle edge and skip edge present, absent elsewhere
  CHECK(g.at(0, 1, 0) == 1.0);
  CHECK(g.at(0, 2, 0) == 1.0);
  CHECK(g.at(0, 3, 0) == 0.0);

  Graph h = make_csl({41, 9});
  CHECK(h.undirected_edge_count() == 82);
  for (int u = 0; u < 41; ++u) CHECK(h.degree(u) == 4);
}

TEST_CASE("circulant skip graph rejects bad parameters") {
  CHECK_THROWS_AS(make_csl({10, 2}), ParameterError);   // shares a factor
  CHECK_THROWS_AS(make_csl({11, 10}), ParameterError);  // stride too large
  CHECK_THROWS_AS(make_csl({11, 1}), ParameterError);   // collapses onto the cycle
}

TEST_CASE("circulant skip sweep stays 4-regular and symmetric") {
  for (int m = 5; m <= 101; ++m)
    for (int r = 2; r < m - 1; ++r) {
      if (std::gcd(m, r) != 1) continue;
      Graph g = make_csl({m, r});
      CHECK(g.edge_symmetric());
      CHECK(g.undirected_edge_count() == 2 * m);
      for (int u = 0; u < m; ++u) {
        if (g.degree(u) != 4) {
          CAPTURE(m);
          CAPTURE(r);
          CHECK(g.degree(u) == 4);
        }
      }
    }
}

TEST_CASE("isomorphism holds for relabeled copies") {
  Rng rng(77);
  for (int rep = 0; rep < 100; ++rep) {
    int n = 2 + static_cast<int>(rng.below(6));  // n in [2, 7]
    Graph g = random_graph(n, 0.45, 1, 1, rng);
    Permutation p = Permutation::random(n, rng);
    CHECK(brute_force_isomorphic(g, permute(g, p)));
  }
}

TEST_CASE("isomorphism distinguishes different structures") {
  CHECK_FALSE(brute_force_isomorphic(triangle_graph(), path_graph(3)));
  CHECK_FALSE(brute_force_isomorphic(make_csl({11, 2}), make_csl({11, 3})));
  CHECK_FALSE(brute_force_isomorphic(path_graph(4), star_graph(3)));
  // feature-sensitive: same structure, different vertex features
  Graph a = path_graph(3), b = path_graph(3);
  b.feat(1, 0) = 2.0;
  CHECK_FALSE(brute_force_isomorphic(a, b));
  // edge-feature sensitive
  Graph c = Graph::zeros(2, 1, 0), d = Graph::zeros(2, 1, 0);
  c.add_undirected_edge(0, 1, {1.0});
  d.add_undirected_edge(0, 1, {2.0});
  CHECK_FALSE(brute_force_isomorphic(c, d));
}

TEST_CASE("isomorphism search is guarded") {
  Graph big = path_graph(13);
  CHECK_THROWS_AS(brute_force_isomorphic(big, big), SizeError);
}

TEST_CASE("one-hot id augmentation matches the worked 4-vertex example") {
  // adjacency rows (0,0,0,1),(0,0,1,1),(0,1,0,1),(1,1,1,0); features 6,2,1,5
  Graph g = Graph::zeros(4, 0, 1);
  g.feat(0, 0) = 6.0;
  g.feat(1, 0) = 2.0;
  g.feat(2, 0) = 1.0;
  g.feat(3, 0) = 5.0;
  g.add_undirected_edge(0, 3);
  g.add_undirected_edge(1, 2);
  g.add_undirected_edge(1, 3);
  g.add_undirected_edge(2, 3);

  SUBCASE("identity ids append the identity block") {
    Graph a = augment_onehot_ids(g, Permutation::identity(4), 4);
    CHECK(a.d_v == 5);
    CHECK(a.adj == g.adj);
    const double expect[4][5] = {{6, 1, 0, 0, 0}, {2, 0, 1, 0, 0}, {1, 0, 0, 1, 0}, {5, 0, 0, 0, 1}};
    for (int i = 0; i < 4; ++i)
      for (int l = 0; l < 5; ++l) CHECK(a.feat(i, l) == expect[i][l]);
  }

  SUBCASE("swapping the first two vertices swaps their id rows") {
    Graph a = augment_onehot_ids(g, Permutation({1, 0, 2, 3}), 4);
    const double expect[4][5] = {{6, 0, 1, 0, 0}, {2, 1, 0, 0, 0}, {1, 0, 0, 1, 0}, {5, 0, 0, 0, 1}};
    for (int i = 0; i < 4; ++i)
      for (int l = 0; l < 5; ++l) CHECK(a.feat(i, l) == expect[i][l]);
  }

  SUBCASE("modulus one adds a constant column") {
    Graph a = augment_onehot_ids(g, Permutation({1, 0, 2, 3}), 1);
    CHECK(a.d_v == 2);
    for (int i = 0; i < 4; ++i) CHECK(a.feat(i, 1) == 1.0);
  }

  SUBCASE("modulus bounds are enforced") {
    CHECK_THROWS_AS(augment_onehot_ids(g, Permutation::identity(4), 0), ParameterError);
    CHECK_THROWS_AS(augment_onehot_ids(g, Permutation::identity(4), 5), ParameterError);
    CHECK_THROWS_AS(augment_onehot_ids(g, Permutation::identity(3), 4), DimensionError);
  }

  SUBCASE("modulus m wraps ids") {
    Graph a = augment_onehot_ids(g, Permutation::identity(4), 3);
    CHECK(a.feat(3, 1 + 0) == 1.0);  // 3 mod 3 = 0
    CHECK(a.feat(3, 1 + 1) == 0.0);
  }
}

TEST_CASE("induced subgraph extracts the selected block") {
  Graph g = five_vertex_example(1);

  SUBCASE("selected triple keeps its internal edges") {
    // 1-based vertices (3, 4, 1): edges {3,4} and {1,3} survive, {1,4} absent
    Graph sub = induced_subgraph(g, {2, 3, 0});
    CHECK(sub.n == 3);
    CHECK(sub.at(0, 1, 0) == 1.0);
    CHECK(sub.at(0, 2, 0) == 1.0);
    CHECK(sub.at(1, 2, 0) == 0.0);
    CHECK(sub.at(0, 1, 1) == g.at(2, 3, 1));
    CHECK(sub.feat(0, 0) == g.feat(2, 0));
    CHECK(sub.feat(2, 0) == g.feat(0, 0));
  }

  SUBCASE("full identity selection returns the graph") {
    CHECK(induced_subgraph(g, {0, 1, 2, 3, 4}) == g);
  }

  SUBCASE("equals the top-left block of a completing relabeling") {
    std::vector<int> all{0, 1, 2, 3, 4};
    // every ordered triple of distinct vertices
    for (int a : all)
      for (int b : all)
        for (int c : all) {
          if (a == b || a == c || b == c) continue;
          std::vector<int> sel{a, b, c};
          Graph sub = induced_subgraph(g, sel);
          // build a permutation sending sel[t] -> t, others after
          std::vector<int> pm(5, -1);
          pm[a] = 0;
          pm[b] = 1;
          pm[c] = 2;
          int next = 3;
          for (int v = 0; v < 5; ++v)
            if (pm[v] == -1) pm[v] = next++;
          Graph top = permute(g, Permutation(pm));
          Graph block = induced_subgraph(top, {0, 1, 2});
          CHECK(sub == block);
        }
  }

  SUBCASE("rejects duplicates and out-of-range entries") {
    CHECK_THROWS_AS(induced_subgraph(g, {0, 0, 1}), ParameterError);
    CHECK_THROWS_AS(induced_subgraph(g, {0, 5}), ParameterError);
    CHECK_THROWS_AS(induced_subgraph(g, {-1}), ParameterError);
  }
}

TEST_CASE("graph JSON round-trips exactly") {
  Rng rng(123);
  for (int rep = 0; rep < 10; ++rep) {
    Graph g = random_graph(6, 0.5, 2, 3, rng);
    Graph back = graph_from_json_text(graph_to_json_text(g));
    CHECK(back == g);
  }
  Graph empty = Graph::zeros(3, 0, 0);
  CHECK(graph_from_json_text(graph_to_json_text(empty)) == empty);
}

TEST_CASE("graph JSON file save and load") {
  Graph g = make_csl({11, 3});
  const std::string path = "test_graph_roundtrip.json";
  save_graph_json(g, path);
  Graph back = load_graph_json(path);
  CHECK(back == g);
  std::remove(path.c_str());
}

TEST_CASE("graph JSON rejects malformed input") {
  CHECK_THROWS_AS(graph_from_json_text("not json"), IoError);
  CHECK_THROWS_AS(graph_from_json_text("{\"n\": 2}"), IoError);
  CHECK_THROWS_AS(graph_from_json_text(
                      R"({"n":2,"d_e":0,"d_v":0,"edges":[[0,1]],"vfeat":[]})"),
                  IoError);
  CHECK_THROWS_AS(load_graph_json("no_such_file.json"), IoError);
  // asymmetric tensors are not representable
  Graph bad = Graph::zeros(2, 0, 0);
  bad.at(0, 1, 0) = 1.0;
  CHECK_THROWS_AS(graph_to_json_text(bad), IoError);
}
