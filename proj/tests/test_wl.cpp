#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rp/wl.hpp"
#include "test_util.hpp"

using namespace rp;
using namespace rptest;

TEST_CASE("regular graphs with constant features stay one color class") {
  Coloring c = wl_refine(make_csl({11, 2}));
  CHECK(c.num_colors() == 1);
  for (int v : c.colors) CHECK(v == 0);
  // stabilizes immediately: one round proves no split
  CHECK(c.rounds == 1);
}

TEST_CASE("star splits into center and leaves") {
  Coloring c = wl_refine(star_graph(3));
  CHECK(c.num_colors() == 2);
  CHECK(c.colors[1] == c.colors[2]);
  CHECK(c.colors[1] == c.colors[3]);
  CHECK(c.colors[0] != c.colors[1]);
}

TEST_CASE("path interior and endpoints separate") {
  Coloring c = wl_refine(path_graph(5));
  // orbit classes: {0,4}, {1,3}, {2}
  CHECK(c.num_colors() == 3);
  CHECK(c.colors[0] == c.colors[4]);
  CHECK(c.colors[1] == c.colors[3]);
  CHECK(c.colors[0] != c.colors[1]);
  CHECK(c.colors[2] != c.colors[1]);
}

TEST_CASE("initial colors come from feature rows") {
  Graph g = Graph::zeros(3, 0, 1);
  g.feat(0, 0) = 1.0;
  g.feat(1, 0) = 2.0;
  g.feat(2, 0) = 1.0;
  Coloring c = wl_refine(g, 0);
  CHECK(c.counts_per_round.front() == 2);
  CHECK(c.colors[0] == c.colors[2]);
  CHECK(c.colors[0] != c.colors[1]);
  CHECK(c.rounds == 0);
}

TEST_CASE("max_rounds caps refinement") {
  // path of 7: needs 3 rounds to stabilize fully
  Graph g = path_graph(7);
  Coloring one = wl_refine(g, 1);
  CHECK(one.rounds == 1);
  CHECK(one.counts_per_round.size() == 2);
  Coloring full = wl_refine(g);
  CHECK(full.counts_per_round.size() >= one.counts_per_round.size());
  CHECK_THROWS_AS(wl_refine(g, -1), ParameterError);
}

TEST_CASE("color counts grow monotonically and stabilize within n rounds") {
  Rng rng(42);
  for (int rep = 0; rep < 30; ++rep) {
    int n = 2 + static_cast<int>(rng.below(7));
    Graph g = random_graph(n, 0.4, 0, 1, rng);
    Coloring c = wl_refine(g);
    for (std::size_t t = 1; t < c.counts_per_round.size(); ++t)
      CHECK(c.counts_per_round[t] >= c.counts_per_round[t - 1]);
    CHECK(c.rounds <= n);
    // last round did not split further
    CHECK(c.counts_per_round.back() ==
          c.counts_per_round[c.counts_per_round.size() - 2]);
  }
}

TEST_CASE("stable colors relabel equivariantly") {
  Rng rng(99);
  for (int rep = 0; rep < 40; ++rep) {
    int n = 2 + static_cast<int>(rng.below(7));
    Graph g = random_graph(n, 0.45, 0, 2, rng);
    Permutation p = Permutation::random(n, rng);
    Coloring cg = wl_refine(g);
    Coloring cp = wl_refine(permute(g, p));
    for (int u = 0; u < n; ++u) CHECK(cp.colors[p(u)] == cg.colors[u]);
  }
}

TEST_CASE("fingerprint is invariant under relabeling") {
  Rng rng(7);
  for (int rep = 0; rep < 25; ++rep) {
    int n = 2 + static_cast<int>(rng.below(7));
    Graph g = random_graph(n, 0.5, 0, 1, rng);
    Permutation p = Permutation::random(n, rng);
    CHECK(wl_fingerprint(g) == wl_fingerprint(permute(g, p)));
  }
}

TEST_CASE("fingerprint separates refinement-distinguishable graphs") {
  CHECK(wl_fingerprint(triangle_graph()) != wl_fingerprint(path_graph(3)));
  CHECK(wl_fingerprint(path_graph(4)) != wl_fingerprint(star_graph(3)));
  CHECK(wl_fingerprint(cycle_graph(6)) != wl_fingerprint(cycle_graph(7)));
}

TEST_CASE("refinement cannot separate the 11-vertex skip pair") {
  CHECK(wl_fingerprint(make_csl({11, 2})) == wl_fingerprint(make_csl({11, 3})));
}

TEST_CASE("isomorphic graphs always share a fingerprint") {
  Rng rng(31);
  std::vector<Graph> corpus;
  for (int rep = 0; rep < 12; ++rep)
    corpus.push_back(random_graph(2 + static_cast<int>(rng.below(5)), 0.5, 0, 1, rng));
  for (std::size_t i = 0; i < corpus.size(); ++i)
    for (std::size_t j = i + 1; j < corpus.size(); ++j)
      if (brute_force_isomorphic(corpus[i], corpus[j]))
        CHECK(wl_fingerprint(corpus[i]) == wl_fingerprint(corpus[j]));
  // make sure the soundness loop exercised at least one isomorphic pair
  Graph g = corpus.front();
  Permutation p = Permutation::random(g.n, rng);
  CHECK(wl_fingerprint(g) == wl_fingerprint(permute(g, p)));
}
