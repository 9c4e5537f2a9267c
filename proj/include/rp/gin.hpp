#pragma once

#include <cstdint>
#include <vector>

#include "rp/graph.hpp"
#include "rp/nn.hpp"

namespace rp {

struct GinConfig {
  int num_layers = 5;
  int mlp_hidden = 16;   // two hidden layers of this width inside every MLP
  int embed_dim = 16;    // node embedding width between layers
  int num_classes = 10;
  int input_dim = 1;     // vertex feature width the model expects
  bool train_epsilon = true;
  bool use_input_embedding_mlp = true;  // map raw features to embed_dim first

  void validate() const;
};

// Sum-aggregation message-passing classifier:
//   h^(l) = MLP_l((1 + eps_l) h^(l-1) + sum_{v in N(u)} h_v^(l-1))
// graph embedding = concat over l = 1..L of the per-layer node sums
// (layer 0 excluded), logits = graph_embedding * W_head (no bias).
struct GinModel {
  GinConfig cfg;
  ParamStore store;
  Mlp input_embed;              // only when cfg.use_input_embedding_mlp
  std::vector<Mlp> layer_mlps;  // L entries
  std::vector<Var> epsilons;    // 1x1 each; leaves outside the store if frozen
  Var head;                     // (L * embed_dim) x num_classes

  static GinModel create(const GinConfig& cfg, std::uint64_t seed);

  int graph_embedding_dim() const { return cfg.num_layers * cfg.embed_dim; }
};

AdjListPtr adjacency_list(const Graph& g);

// Differentiable whole-graph forward pass over an explicit feature matrix
// (rows = vertices). The returned handles stay connected to the model's
// parameter leaves, so backward() reaches them.
struct GinForward {
  std::vector<Var> layer_embeddings;  // h^(1..L), each n x embed_dim
  Var graph_embedding;                // 1 x (L * embed_dim)
  Var logits;                         // 1 x num_classes
};
GinForward gin_forward(const AdjListPtr& adj, const Mat& features, const GinModel& model);

// Convenience wrappers that read features from the graph itself; the graph's
// vertex feature width must equal cfg.input_dim.
std::vector<Mat> gin_node_embeddings(const Graph& g, const GinModel& model);  // values of h^(1..L)
std::vector<double> gin_graph_embedding(const Graph& g, const GinModel& model);
std::vector<double> gin_logits(const Graph& g, const GinModel& model);
std::vector<double> gin_classify(const Graph& g, const GinModel& model);  // softmax probabilities

Mat feature_matrix(const Graph& g);  // n x d_v copy of the vertex features

}  // namespace rp
