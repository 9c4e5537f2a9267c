#include "rp/gin.hpp"

namespace rp {

void GinConfig::validate() const {
  if (num_layers < 1) throw ConfigError("num_layers must be at least 1");
  if (mlp_hidden < 1 || embed_dim < 1 || input_dim < 1)
    throw ConfigError("layer widths must be positive");
  if (num_classes < 2) throw ConfigError("num_classes must be at least 2");
}

GinModel GinModel::create(const GinConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  GinModel model;
  model.cfg = cfg;
  Rng rng(seed);
  if (cfg.use_input_embedding_mlp)
    model.input_embed = Mlp::create(model.store, "embed",
                                    {cfg.input_dim, cfg.mlp_hidden, cfg.mlp_hidden, cfg.embed_dim},
                                    rng);
  const int in0 = cfg.use_input_embedding_mlp ? cfg.embed_dim : cfg.input_dim;
  for (int l = 0; l < cfg.num_layers; ++l) {
    const int in = l == 0 ? in0 : cfg.embed_dim;
    model.layer_mlps.push_back(Mlp::create(model.store, "layer" + std::to_string(l),
                                           {in, cfg.mlp_hidden, cfg.mlp_hidden, cfg.embed_dim},
                                           rng));
    // eps starts at 0 so the initial update is plain self + neighbor sum
    model.epsilons.push_back(cfg.train_epsilon
                                 ? model.store.add("layer" + std::to_string(l) + ".eps", Mat(1, 1))
                                 : make_leaf(Mat(1, 1)));
  }
  model.head = model.store.add(
      "head.w", glorot_uniform(cfg.num_layers * cfg.embed_dim, cfg.num_classes, rng));
  return model;
}

AdjListPtr adjacency_list(const Graph& g) {
  auto adj = std::make_shared<AdjList>(static_cast<std::size_t>(g.n));
  for (int u = 0; u < g.n; ++u) (*adj)[u] = g.neighbors(u);
  return adj;
}

Mat feature_matrix(const Graph& g) {
  Mat x(g.n, g.d_v);
  x.v = g.vfeat;
  return x;
}

GinForward gin_forward(const AdjListPtr& adj, const Mat& features, const GinModel& model) {
  if (features.cols != model.cfg.input_dim)
    throw ConfigError("feature width does not match the model's input_dim");
  if (!adj || static_cast<int>(adj->size()) != features.rows)
    throw DimensionError("adjacency list size does not match feature rows");

  GinForward out;
  Var h = make_leaf(features);
  if (model.cfg.use_input_embedding_mlp) h = model.input_embed.forward(h);
  std::vector<Var> sums;
  for (int l = 0; l < model.cfg.num_layers; ++l) {
    Var self = scale_by(h, add_const(model.epsilons[l], 1.0));
    Var pre = add(self, aggregate_neighbors(adj, h));
    h = model.layer_mlps[l].forward(pre);
    out.layer_embeddings.push_back(h);
    sums.push_back(sum_rows(h));
  }
  out.graph_embedding = concat_cols(sums);
  out.logits = matmul(out.graph_embedding, model.head);
  return out;
}

namespace {

GinForward forward_from_graph(const Graph& g, const GinModel& model) {
  if (g.d_v != model.cfg.input_dim)
    throw ConfigError("graph vertex feature width does not match the model's input_dim");
  return gin_forward(adjacency_list(g), feature_matrix(g), model);
}

}  // namespace

std::vector<Mat> gin_node_embeddings(const Graph& g, const GinModel& model) {
  GinForward f = forward_from_graph(g, model);
  std::vector<Mat> out;
  out.reserve(f.layer_embeddings.size());
  for (const Var& h : f.layer_embeddings) out.push_back(h.value());
  return out;
}

std::vector<double> gin_graph_embedding(const Graph& g, const GinModel& model) {
  return forward_from_graph(g, model).graph_embedding.value().v;
}

std::vector<double> gin_logits(const Graph& g, const GinModel& model) {
  return forward_from_graph(g, model).logits.value().v;
}

std::vector<double> gin_classify(const Graph& g, const GinModel& model) {
  return softmax(gin_logits(g, model));
}

}  // namespace rp
