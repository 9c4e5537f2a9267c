#pragma once

#include <string>
#include <utility>
#include <vector>

#include "rp/autodiff.hpp"
#include "rp/rng.hpp"

namespace rp {

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Named trainable leaves plus Adam state. Iteration order is insertion
// order, which makes initialization and updates reproducible.
class ParamStore {
 public:
  Var add(const std::string& name, Mat init);
  Var get(const std::string& name) const;
  bool has(const std::string& name) const;
  const std::vector<std::pair<std::string, Var>>& entries() const { return params_; }

  void zero_grads();
  // Bias-corrected Adam update from the accumulated gradients; zeroes the
  // gradients afterwards and advances the step counter.
  void adam_step(const AdamConfig& cfg);
  long step_count() const { return t_; }

  // Checkpoint JSON: map name -> {"shape": [r, c], "values": [flat]}.
  // Loading requires identical names and shapes; optimizer state resets.
  std::string to_json_text() const;
  void load_json_text(const std::string& text);
  void save_json(const std::string& path) const;
  void load_json(const std::string& path);

 private:
  std::vector<std::pair<std::string, Var>> params_;
  std::vector<Mat> m_, v_;  // Adam moments, parallel to params_
  long t_ = 0;
};

Mat glorot_uniform(int rows, int cols, Rng& rng);  // U(-a, a), a = sqrt(6/(rows+cols))

// Fully connected stack: widths[0] inputs -> ... -> widths.back() outputs,
// ReLU on hidden layers, linear final layer.
struct Mlp {
  std::vector<int> widths;
  std::vector<Var> weights;  // widths[i] x widths[i+1]
  std::vector<Var> biases;   // 1 x widths[i+1]

  static Mlp create(ParamStore& store, const std::string& prefix, const std::vector<int>& widths,
                    Rng& rng);
  Var forward(const Var& x) const;
};

}  // namespace rp
