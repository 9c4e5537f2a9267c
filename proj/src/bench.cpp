#include "rp/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <json.hpp>

namespace rp {

const std::vector<int>& CslDataset::class_skip_strides() {
  static const std::vector<int> strides{2, 3, 4, 5, 6, 9, 11, 12, 13, 16};
  return strides;
}

CslDataset build_csl_dataset(std::uint64_t seed) {
  constexpr int kVertices = 41;
  constexpr int kCopies = 14;
  CslDataset ds;
  const auto& strides = CslDataset::class_skip_strides();
  for (int c = 0; c < static_cast<int>(strides.size()); ++c) {
    Graph base = make_csl({kVertices, strides[c]});
    ds.graphs.push_back(base);
    ds.labels.push_back(c);
    ds.provenance.emplace_back(strides[c], 0);

    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c)));
    std::vector<Permutation> drawn;
    while (static_cast<int>(drawn.size()) < kCopies) {
      Permutation p = Permutation::random(kVertices, rng);
      if (p == Permutation::identity(kVertices)) continue;
      if (std::find(drawn.begin(), drawn.end(), p) != drawn.end()) continue;
      drawn.push_back(p);
      ds.graphs.push_back(permute(base, p));
      ds.labels.push_back(c);
      ds.provenance.emplace_back(strides[c], static_cast<int>(drawn.size()));
    }
  }
  return ds;
}

FoldPlan make_folds(const CslDataset& ds, std::uint64_t seed) {
  constexpr int kFolds = 5;
  const int num_classes = 1 + *std::max_element(ds.labels.begin(), ds.labels.end());
  FoldPlan plan;
  plan.train.assign(kFolds, {});
  plan.validation.assign(kFolds, {});
  for (int c = 0; c < num_classes; ++c) {
    std::vector<int> idx;
    for (std::size_t i = 0; i < ds.labels.size(); ++i)
      if (ds.labels[i] == c) idx.push_back(static_cast<int>(i));
    if (idx.size() % kFolds != 0)
      throw DataError("class sizes must divide evenly into the folds");
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(c), 0x0f01d5));
    rng.shuffle(idx);
    const int per_fold = static_cast<int>(idx.size()) / kFolds;
    for (int f = 0; f < kFolds; ++f)
      for (int t = 0; t < per_fold; ++t) {
        int g = idx[static_cast<std::size_t>(f * per_fold + t)];
        plan.validation[f].push_back(g);
        for (int other = 0; other < kFolds; ++other)
          if (other != f) plan.train[other].push_back(g);
      }
  }
  for (int f = 0; f < kFolds; ++f) {
    std::sort(plan.train[f].begin(), plan.train[f].end());
    std::sort(plan.validation[f].begin(), plan.validation[f].end());
  }
  return plan;
}

void TrainConfig::validate(const CslDataset& ds) const {
  if (ds.graphs.empty()) throw ConfigError("dataset is empty");
  if (epochs < 0) throw ConfigError("epochs must be non-negative");
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (init_seeds < 1) throw ConfigError("at least one initialization seed is required");
  if (num_layers < 1 || mlp_hidden < 1 || embed_dim < 1)
    throw ConfigError("model widths must be positive");
  if (model == ModelKind::rp_gin) {
    const int n = ds.graphs.front().n;
    if (id_modulus < 1 || id_modulus > n)
      throw ConfigError("id modulus must lie in [1, n] for the id-augmented model");
    if (inference_samples < 1)
      throw ConfigError("inference averaging needs at least one sampled ordering");
  }
}

std::string train_config_to_json_text(const TrainConfig& cfg) {
  nlohmann::json j{{"model", cfg.model == ModelKind::gin ? "gin" : "rp-gin"},
                   {"epochs", cfg.epochs},
                   {"lr", cfg.lr},
                   {"id_modulus", cfg.id_modulus},
                   {"inference_samples", cfg.inference_samples},
                   {"init_seeds", cfg.init_seeds},
                   {"seed_base", cfg.seed_base},
                   {"num_layers", cfg.num_layers},
                   {"mlp_hidden", cfg.mlp_hidden},
                   {"embed_dim", cfg.embed_dim}};
  return j.dump(2);
}

Aggregates aggregate(const std::vector<double>& values) {
  if (values.empty()) throw UsageError("aggregating an empty value list");
  Aggregates a;
  std::vector<double> sorted(values);
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(values.size());
  a.min = sorted.front();
  a.max = sorted.back();
  a.median = values.size() % 2 == 1
                 ? sorted[values.size() / 2]
                 : 0.5 * (sorted[values.size() / 2 - 1] + sorted[values.size() / 2]);
  double sum = 0.0;
  for (double v : values) sum += v;
  a.mean = sum / n;
  double sq = 0.0;
  for (double v : values) sq += (v - a.mean) * (v - a.mean);
  a.sd = std::sqrt(sq / n);  // population convention
  return a;
}

double evaluate_accuracy(const std::vector<int>& predictions, const std::vector<int>& labels) {
  if (predictions.size() != labels.size() || predictions.empty())
    throw UsageError("predictions and labels must be non-empty and aligned");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i] == labels[i]) ++hits;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(predictions.size());
}

bool RunReport::any_failed() const {
  return std::any_of(rows.begin(), rows.end(), [](const RunRecord& r) { return r.failed; });
}

namespace {

int argmax(const std::vector<double>& v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

struct SingleRun {
  double accuracy = 0.0;
  bool failed = false;
};

SingleRun run_one(const CslDataset& ds, const std::vector<int>& train_idx,
                  const std::vector<int>& val_idx, const TrainConfig& cfg,
                  std::uint64_t run_seed) {
  const int num_classes =
      1 + *std::max_element(ds.labels.begin(), ds.labels.end());
  const bool rp_mode = cfg.model == ModelKind::rp_gin;
  const int d_v = ds.graphs.front().d_v;

  GinConfig gc;
  gc.num_layers = cfg.num_layers;
  gc.mlp_hidden = cfg.mlp_hidden;
  gc.embed_dim = cfg.embed_dim;
  gc.num_classes = num_classes;
  gc.input_dim = rp_mode ? d_v + cfg.id_modulus : d_v;
  gc.train_epsilon = true;
  // raw one-hot ids feed the first layer directly; plain features go
  // through the input embedding stack
  gc.use_input_embedding_mlp = !rp_mode;

  GinModel model = GinModel::create(gc, derive_seed(run_seed, 1));
  Rng train_rng(derive_seed(run_seed, 2));
  Rng eval_rng(derive_seed(run_seed, 3));

  std::vector<TrainExample> batch;
  batch.reserve(train_idx.size());
  for (int i : train_idx)
    batch.push_back({&ds.graphs[static_cast<std::size_t>(i)], ds.labels[static_cast<std::size_t>(i)],
                     adjacency_list(ds.graphs[static_cast<std::size_t>(i)])});

  AdamConfig adam;
  adam.lr = cfg.lr;

  SingleRun out;
  try {
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
      double loss;
      if (rp_mode) {
        // one fresh ordering per graph per epoch (full batch: one step/epoch)
        loss = pi_sgd_train_step(batch, model, adam, cfg.id_modulus, train_rng);
      } else {
        std::vector<Permutation> identity_perms(
            batch.size(), Permutation::identity(ds.graphs.front().n));
        Var l = rp_batch_loss(batch, identity_perms, model, 0);
        model.store.zero_grads();
        backward(l);
        model.store.adam_step(adam);
        loss = l.value().v[0];
      }
      if (!std::isfinite(loss)) {
        out.failed = true;
        return out;
      }
    }

    std::vector<int> preds, truth;
    for (int i : val_idx) {
      const Graph& g = ds.graphs[static_cast<std::size_t>(i)];
      std::vector<double> scores;
      if (rp_mode) {
        // mean softmax score over sampled orderings, then argmax
        AdjListPtr adj = adjacency_list(g);
        std::vector<double> acc(static_cast<std::size_t>(num_classes), 0.0);
        for (int s = 0; s < cfg.inference_samples; ++s) {
          Permutation p = Permutation::random(g.n, eval_rng);
          GinForward fw = gin_forward(adj, augmented_id_features(g, p, cfg.id_modulus), model);
          std::vector<double> probs = softmax(fw.logits.value().v);
          for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += probs[c];
        }
        scores = acc;
      } else {
        scores = gin_classify(g, model);
      }
      preds.push_back(argmax(scores));
      truth.push_back(ds.labels[static_cast<std::size_t>(i)]);
    }
    out.accuracy = evaluate_accuracy(preds, truth);
  } catch (const std::exception&) {
    out.failed = true;
  }
  return out;
}

}  // namespace

RunReport run_experiment(const CslDataset& ds, const FoldPlan& folds, const TrainConfig& cfg) {
  cfg.validate(ds);
  if (folds.train.size() != folds.validation.size() || folds.train.empty())
    throw ConfigError("fold plan is empty or inconsistent");

  const auto t0 = std::chrono::steady_clock::now();
  RunReport report;
  report.config_echo = train_config_to_json_text(cfg);

  std::vector<double> all_acc;
  for (std::size_t f = 0; f < folds.train.size(); ++f) {
    std::vector<double> fold_acc;
    for (int s = 0; s < cfg.init_seeds; ++s) {
      SingleRun r = run_one(ds, folds.train[f], folds.validation[f], cfg,
                            derive_seed(cfg.seed_base, f, static_cast<std::uint64_t>(s)));
      report.rows.push_back({static_cast<int>(f), s, r.accuracy, r.failed});
      if (!r.failed) {
        fold_acc.push_back(r.accuracy);
        all_acc.push_back(r.accuracy);
      }
    }
    if (!fold_acc.empty()) report.fold_means.push_back(aggregate(fold_acc).mean);
  }

  if (!all_acc.empty()) report.over_runs = aggregate(all_acc);
  if (!report.fold_means.empty()) report.over_folds = aggregate(report.fold_means);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

namespace {

nlohmann::json aggregates_json(const Aggregates& a) {
  return {{"mean", a.mean}, {"median", a.median}, {"max", a.max}, {"min", a.min}, {"sd", a.sd}};
}

}  // namespace

void emit_report(const RunReport& report, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create report directory: " + dir);

  std::ofstream csv(dir + "/runs.csv");
  if (!csv) throw IoError("cannot write runs.csv under: " + dir);
  csv << "fold,init_seed,accuracy,failed\n";
  for (const RunRecord& r : report.rows)
    csv << r.fold << ',' << r.init_seed << ',' << r.accuracy << ',' << (r.failed ? 1 : 0) << '\n';

  nlohmann::json summary{{"rows", report.rows.size()},
                         {"over_runs", aggregates_json(report.over_runs)},
                         {"fold_means", report.fold_means},
                         {"over_folds", aggregates_json(report.over_folds)},
                         {"any_failed", report.any_failed()},
                         {"wall_seconds", report.wall_seconds}};
  std::ofstream js(dir + "/summary.json");
  if (!js) throw IoError("cannot write summary.json under: " + dir);
  js << summary.dump(2) << '\n';

  std::ofstream cfg(dir + "/config.json");
  if (!cfg) throw IoError("cannot write config.json under: " + dir);
  cfg << report.config_echo << '\n';
}

}  // namespace rp
