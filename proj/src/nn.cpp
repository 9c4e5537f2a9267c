#include "rp/nn.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace rp {

Var ParamStore::add(const std::string& name, Mat init) {
  if (has(name)) throw UsageError("parameter registered twice: " + name);
  Var v = make_leaf(std::move(init));
  params_.emplace_back(name, v);
  m_.emplace_back(v.rows(), v.cols());
  v_.emplace_back(v.rows(), v.cols());
  return v;
}

Var ParamStore::get(const std::string& name) const {
  for (const auto& [n, v] : params_)
    if (n == name) return v;
  throw UsageError("unknown parameter: " + name);
}

bool ParamStore::has(const std::string& name) const {
  for (const auto& [n, v] : params_)
    if (n == name) return true;
  return false;
}

void ParamStore::zero_grads() {
  for (auto& [n, v] : params_) v.zero_grad();
}

void ParamStore::adam_step(const AdamConfig& cfg) {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t_));
  for (std::size_t p = 0; p < params_.size(); ++p) {
    Var& var = params_[p].second;
    Mat& w = var.value_mut();
    const Mat& g = var.grad();
    Mat& m = m_[p];
    Mat& v = v_[p];
    for (std::size_t i = 0; i < w.v.size(); ++i) {
      m.v[i] = cfg.beta1 * m.v[i] + (1.0 - cfg.beta1) * g.v[i];
      v.v[i] = cfg.beta2 * v.v[i] + (1.0 - cfg.beta2) * g.v[i] * g.v[i];
      const double mhat = m.v[i] / bc1;
      const double vhat = v.v[i] / bc2;
      w.v[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
    var.zero_grad();
  }
}

std::string ParamStore::to_json_text() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [name, var] : params_) {
    const Mat& w = var.value();
    j[name] = {{"shape", {w.rows, w.cols}}, {"values", w.v}};
  }
  return j.dump();
}

void ParamStore::load_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("bad checkpoint JSON: ") + e.what());
  }
  if (j.size() != params_.size()) throw IoError("checkpoint parameter set does not match model");
  for (auto& [name, var] : params_) {
    if (!j.contains(name)) throw IoError("checkpoint is missing parameter: " + name);
    const auto& entry = j.at(name);
    const auto shape = entry.at("shape").get<std::vector<int>>();
    Mat& w = var.value_mut();
    if (shape.size() != 2 || shape[0] != w.rows || shape[1] != w.cols)
      throw IoError("checkpoint shape mismatch for parameter: " + name);
    auto vals = entry.at("values").get<std::vector<double>>();
    if (vals.size() != w.v.size()) throw IoError("checkpoint value count mismatch for: " + name);
    w.v = std::move(vals);
  }
  for (std::size_t p = 0; p < params_.size(); ++p) {
    m_[p] = Mat(m_[p].rows, m_[p].cols);
    v_[p] = Mat(v_[p].rows, v_[p].cols);
  }
  t_ = 0;
}

void ParamStore::save_json(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write checkpoint file: " + path);
  out << to_json_text() << '\n';
}

void ParamStore::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  load_json_text(ss.str());
}

Mat glorot_uniform(int rows, int cols, Rng& rng) {
  const double a = std::sqrt(6.0 / (rows + cols));
  Mat w(rows, cols);
  for (double& t : w.v) t = rng.uniform(-a, a);
  return w;
}

Mlp Mlp::create(ParamStore& store, const std::string& prefix, const std::vector<int>& widths,
                Rng& rng) {
  if (widths.size() < 2) throw ConfigError("mlp needs at least input and output widths");
  for (int w : widths)
    if (w < 1) throw ConfigError("mlp widths must be positive");
  Mlp mlp;
  mlp.widths = widths;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    mlp.weights.push_back(
        store.add(prefix + ".w" + std::to_string(i), glorot_uniform(widths[i], widths[i + 1], rng)));
    mlp.biases.push_back(store.add(prefix + ".b" + std::to_string(i), Mat(1, widths[i + 1])));
  }
  return mlp;
}

Var Mlp::forward(const Var& x) const {
  Var h = x;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    h = add_rowvec(matmul(h, weights[i]), biases[i]);
    if (i + 1 < weights.size()) h = relu(h);
  }
  return h;
}

}  // namespace rp
