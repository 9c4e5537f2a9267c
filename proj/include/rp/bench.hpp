#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rp/pooling.hpp"

namespace rp {

// 150 circulant-skip graphs: 10 skip strides x (1 canonical + 14 relabeled
// copies), all on 41 vertices, labeled by stride class.
struct CslDataset {
  std::vector<Graph> graphs;
  std::vector<int> labels;                       // 0..9
  std::vector<std::pair<int, int>> provenance;   // (skip stride, copy id 0..14)

  static const std::vector<int>& class_skip_strides();  // {2,3,4,5,6,9,11,12,13,16}
};

CslDataset build_csl_dataset(std::uint64_t seed);

// Balanced 5-fold split: every fold validates on 3 graphs per class (30)
// and trains on the remaining 12 per class (120).
struct FoldPlan {
  std::vector<std::vector<int>> train;       // 5 entries
  std::vector<std::vector<int>> validation;  // 5 entries
};

FoldPlan make_folds(const CslDataset& ds, std::uint64_t seed);

enum class ModelKind { gin, rp_gin };

struct TrainConfig {
  ModelKind model = ModelKind::rp_gin;
  int epochs = 1000;
  double lr = 0.01;
  int id_modulus = 10;        // rp_gin only
  int inference_samples = 5;  // rp_gin only; >= 1 (exact pooling infeasible at n = 41)
  int init_seeds = 5;         // independent initializations per fold
  std::uint64_t seed_base = 0;
  int num_layers = 5;
  int mlp_hidden = 16;
  int embed_dim = 16;

  void validate(const CslDataset& ds) const;  // throws ConfigError before any training
};
std::string train_config_to_json_text(const TrainConfig& cfg);

struct RunRecord {
  int fold = 0;
  int init_seed = 0;
  double accuracy = 0.0;  // percent
  bool failed = false;    // non-finite loss or training exception
};

struct Aggregates {
  double mean = 0, median = 0, max = 0, min = 0, sd = 0;
};

// Population standard deviation (the documented reporting convention).
Aggregates aggregate(const std::vector<double>& values);

double evaluate_accuracy(const std::vector<int>& predictions, const std::vector<int>& labels);

struct RunReport {
  std::vector<RunRecord> rows;      // fold-major, then init seed
  Aggregates over_runs;             // across all fold x seed rows
  std::vector<double> fold_means;   // per-fold mean over init seeds
  Aggregates over_folds;            // across the fold means
  double wall_seconds = 0.0;
  std::string config_echo;          // JSON

  bool any_failed() const;
};

RunReport run_experiment(const CslDataset& ds, const FoldPlan& folds, const TrainConfig& cfg);

// Writes dir/runs.csv, dir/summary.json, dir/config.json.
void emit_report(const RunReport& report, const std::string& dir);

}  // namespace rp
