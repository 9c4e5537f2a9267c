#include "rp/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_set>

namespace rp {

namespace detail {

struct Node {
  Mat value;
  Mat grad;  // same shape, starts zeroed
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backprop;  // scatter self.grad into parent grads
};

Var wrap(std::shared_ptr<Node> n) {
  Var v;
  v.node_ = std::move(n);
  return v;
}

const std::shared_ptr<Node>& unwrap(const Var& v) {
  if (!v.node_) throw UsageError("operation on an empty Var handle");
  return v.node_;
}

namespace {

std::shared_ptr<Node> fresh(Mat value) {
  auto n = std::make_shared<Node>();
  n->grad = Mat(value.rows, value.cols);
  n->value = std::move(value);
  return n;
}

}  // namespace

}  // namespace detail

using detail::Node;
using detail::unwrap;
using detail::wrap;

const Mat& Var::value() const { return unwrap(*this)->value; }
Mat& Var::value_mut() { return unwrap(*this)->value; }
const Mat& Var::grad() const { return unwrap(*this)->grad; }
void Var::zero_grad() {
  auto& g = unwrap(*this)->grad;
  std::fill(g.v.begin(), g.v.end(), 0.0);
}

Var make_leaf(Mat value) { return wrap(detail::fresh(std::move(value))); }

namespace {

// out += a * b
void mm_acc(const Mat& a, const Mat& b, Mat& out) {
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = &a.v[static_cast<std::size_t>(i) * a.cols];
    double* orow = &out.v[static_cast<std::size_t>(i) * out.cols];
    for (int k = 0; k < a.cols; ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      const double* brow = &b.v[static_cast<std::size_t>(k) * b.cols];
      for (int j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
    }
  }
}

// out += a^T * b
void mm_at_b_acc(const Mat& a, const Mat& b, Mat& out) {
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = &a.v[static_cast<std::size_t>(i) * a.cols];
    const double* brow = &b.v[static_cast<std::size_t>(i) * b.cols];
    for (int k = 0; k < a.cols; ++k) {
      const double aik = arow[k];
      if (aik == 0.0) continue;
      double* orow = &out.v[static_cast<std::size_t>(k) * out.cols];
      for (int j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
    }
  }
}

// out += a * b^T
void mm_a_bt_acc(const Mat& a, const Mat& b, Mat& out) {
  for (int i = 0; i < a.rows; ++i) {
    const double* arow = &a.v[static_cast<std::size_t>(i) * a.cols];
    double* orow = &out.v[static_cast<std::size_t>(i) * out.cols];
    for (int j = 0; j < b.rows; ++j) {
      const double* brow = &b.v[static_cast<std::size_t>(j) * b.cols];
      double dot = 0.0;
      for (int k = 0; k < a.cols; ++k) dot += arow[k] * brow[k];
      orow[j] += dot;
    }
  }
}

Var unary(const Var& x, Mat value, std::function<void(Node&)> backprop) {
  auto n = detail::fresh(std::move(value));
  n->parents = {unwrap(x)};
  n->backprop = std::move(backprop);
  return wrap(std::move(n));
}

}  // namespace

Var add(const Var& a, const Var& b) {
  const auto& av = unwrap(a)->value;
  const auto& bv = unwrap(b)->value;
  if (!av.same_shape(bv)) throw DimensionError("add: operand shapes differ");
  Mat out = av;
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += bv.v[i];
  auto n = detail::fresh(std::move(out));
  n->parents = {unwrap(a), unwrap(b)};
  n->backprop = [](Node& self) {
    for (auto& p : self.parents)
      for (std::size_t i = 0; i < self.grad.v.size(); ++i) p->grad.v[i] += self.grad.v[i];
  };
  return wrap(std::move(n));
}

Var add_rowvec(const Var& x, const Var& b) {
  const auto& xv = unwrap(x)->value;
  const auto& bv = unwrap(b)->value;
  if (bv.rows != 1 || bv.cols != xv.cols)
    throw DimensionError("add_rowvec: bias must be 1 x cols(x)");
  Mat out = xv;
  for (int i = 0; i < out.rows; ++i)
    for (int j = 0; j < out.cols; ++j) out(i, j) += bv.v[static_cast<std::size_t>(j)];
  auto n = detail::fresh(std::move(out));
  n->parents = {unwrap(x), unwrap(b)};
  n->backprop = [](Node& self) {
    Node& px = *self.parents[0];
    Node& pb = *self.parents[1];
    for (std::size_t i = 0; i < self.grad.v.size(); ++i) px.grad.v[i] += self.grad.v[i];
    for (int i = 0; i < self.grad.rows; ++i)
      for (int j = 0; j < self.grad.cols; ++j) pb.grad.v[static_cast<std::size_t>(j)] += self.grad(i, j);
  };
  return wrap(std::move(n));
}

Var add_const(const Var& x, double c) {
  Mat out = unwrap(x)->value;
  for (double& t : out.v) t += c;
  return unary(x, std::move(out), [](Node& self) {
    auto& pg = self.parents[0]->grad;
    for (std::size_t i = 0; i < self.grad.v.size(); ++i) pg.v[i] += self.grad.v[i];
  });
}

Var scale(const Var& x, double c) {
  Mat out = unwrap(x)->value;
  for (double& t : out.v) t *= c;
  return unary(x, std::move(out), [c](Node& self) {
    auto& pg = self.parents[0]->grad;
    for (std::size_t i = 0; i < self.grad.v.size(); ++i) pg.v[i] += c * self.grad.v[i];
  });
}

Var scale_by(const Var& x, const Var& s) {
  const auto& sv = unwrap(s)->value;
  if (sv.rows != 1 || sv.cols != 1) throw DimensionError("scale_by: scale must be 1x1");
  const double c = sv.v[0];
  Mat out = unwrap(x)->value;
  for (double& t : out.v) t *= c;
  auto n = detail::fresh(std::move(out));
  n->parents = {unwrap(x), unwrap(s)};
  n->backprop = [](Node& self) {
    Node& px = *self.parents[0];
    Node& ps = *self.parents[1];
    const double c = ps.value.v[0];
    double acc = 0.0;
    for (std::size_t i = 0; i < self.grad.v.size(); ++i) {
      px.grad.v[i] += c * self.grad.v[i];
      acc += self.grad.v[i] * px.value.v[i];
    }
    ps.grad.v[0] += acc;
  };
  return wrap(std::move(n));
}

Var matmul(const Var& a, const Var& b) {
  const auto& av = unwrap(a)->value;
  const auto& bv = unwrap(b)->value;
  if (av.cols != bv.rows) throw DimensionError("matmul: inner dimensions differ");
  Mat out(av.rows, bv.cols);
  mm_acc(av, bv, out);
  auto n = detail::fresh(std::move(out));
  n->parents = {unwrap(a), unwrap(b)};
  n->backprop = [](Node& self) {
    Node& pa = *self.parents[0];
    Node& pb = *self.parents[1];
    mm_a_bt_acc(self.grad, pb.value, pa.grad);  // dA += dC B^T
    mm_at_b_acc(pa.value, self.grad, pb.grad);  // dB += A^T dC
  };
  return wrap(std::move(n));
}

Var relu(const Var& x) {
  Mat out = unwrap(x)->value;
  for (double& t : out.v) t = t > 0.0 ? t : 0.0;
  return unary(x, std::move(out), [](Node& self) {
    Node& px = *self.parents[0];
    for (std::size_t i = 0; i < self.grad.v.size(); ++i)
      if (px.value.v[i] > 0.0) px.grad.v[i] += self.grad.v[i];
  });
}

Var sum_rows(const Var& x) {
  const auto& xv = unwrap(x)->value;
  Mat out(1, xv.cols);
  for (int i = 0; i < xv.rows; ++i)
    for (int j = 0; j < xv.cols; ++j) out.v[static_cast<std::size_t>(j)] += xv(i, j);
  return unary(x, std::move(out), [](Node& self) {
    Node& px = *self.parents[0];
    for (int i = 0; i < px.grad.rows; ++i)
      for (int j = 0; j < px.grad.cols; ++j) px.grad(i, j) += self.grad.v[static_cast<std::size_t>(j)];
  });
}

Var concat_cols(const std::vector<Var>& xs) {
  if (xs.empty()) throw UsageError("concat_cols: empty input list");
  const int rows = unwrap(xs[0])->value.rows;
  int cols = 0;
  for (const auto& x : xs) {
    if (unwrap(x)->value.rows != rows) throw DimensionError("concat_cols: row counts differ");
    cols += unwrap(x)->value.cols;
  }
  Mat out(rows, cols);
  int off = 0;
  for (const auto& x : xs) {
    const auto& xv = unwrap(x)->value;
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < xv.cols; ++j) out(i, off + j) = xv(i, j);
    off += xv.cols;
  }
  auto n = detail::fresh(std::move(out));
  for (const auto& x : xs) n->parents.push_back(unwrap(x));
  n->backprop = [](Node& self) {
    int off = 0;
    for (auto& p : self.parents) {
      for (int i = 0; i < p->grad.rows; ++i)
        for (int j = 0; j < p->grad.cols; ++j) p->grad(i, j) += self.grad(i, off + j);
      off += p->grad.cols;
    }
  };
  return wrap(std::move(n));
}

Var mean_all(const std::vector<Var>& xs) {
  if (xs.empty()) throw UsageError("mean_all: empty input list");
  const Mat& first = unwrap(xs[0])->value;
  Mat out(first.rows, first.cols);
  for (const auto& x : xs) {
    const auto& xv = unwrap(x)->value;
    if (!xv.same_shape(first)) throw DimensionError("mean_all: operand shapes differ");
    for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += xv.v[i];
  }
  const double inv = 1.0 / static_cast<double>(xs.size());
  for (double& t : out.v) t *= inv;
  auto n = detail::fresh(std::move(out));
  for (const auto& x : xs) n->parents.push_back(unwrap(x));
  n->backprop = [inv](Node& self) {
    for (auto& p : self.parents)
      for (std::size_t i = 0; i < self.grad.v.size(); ++i) p->grad.v[i] += inv * self.grad.v[i];
  };
  return wrap(std::move(n));
}

Var aggregate_neighbors(const AdjListPtr& adj, const Var& h) {
  if (!adj) throw UsageError("aggregate_neighbors: null adjacency list");
  const auto& hv = unwrap(h)->value;
  if (static_cast<int>(adj->size()) != hv.rows)
    throw DimensionError("aggregate_neighbors: adjacency size does not match row count");
  Mat out(hv.rows, hv.cols);
  for (int u = 0; u < hv.rows; ++u) {
    double* orow = &out.v[static_cast<std::size_t>(u) * out.cols];
    for (int v : (*adj)[u]) {
      const double* hrow = &hv.v[static_cast<std::size_t>(v) * hv.cols];
      for (int j = 0; j < hv.cols; ++j) orow[j] += hrow[j];
    }
  }
  auto n = detail::fresh(std::move(out));
  n->parents = {unwrap(h)};
  n->backprop = [adj](Node& self) {
    Node& ph = *self.parents[0];
    for (int u = 0; u < self.grad.rows; ++u) {
      const double* grow = &self.grad.v[static_cast<std::size_t>(u) * self.grad.cols];
      for (int v : (*adj)[u]) {
        double* prow = &ph.grad.v[static_cast<std::size_t>(v) * ph.grad.cols];
        for (int j = 0; j < self.grad.cols; ++j) prow[j] += grow[j];
      }
    }
  };
  return wrap(std::move(n));
}

Var softmax_cross_entropy(const Var& logits, int label) {
  const auto& z = unwrap(logits)->value;
  if (z.rows != 1) throw DimensionError("softmax_cross_entropy: logits must be 1 x C");
  if (label < 0 || label >= z.cols) throw DataError("softmax_cross_entropy: label out of range");
  double m = z.v[0];
  for (double t : z.v) m = std::max(m, t);
  double sum = 0.0;
  for (double t : z.v) sum += std::exp(t - m);
  const double loss = m + std::log(sum) - z.v[static_cast<std::size_t>(label)];
  std::vector<double> probs(z.v.size());
  for (std::size_t i = 0; i < z.v.size(); ++i) probs[i] = std::exp(z.v[i] - m) / sum;

  auto n = detail::fresh(Mat::scalar(loss));
  n->parents = {unwrap(logits)};
  n->backprop = [probs = std::move(probs), label](Node& self) {
    Node& pz = *self.parents[0];
    const double g = self.grad.v[0];
    for (std::size_t i = 0; i < probs.size(); ++i) pz.grad.v[i] += g * probs[i];
    pz.grad.v[static_cast<std::size_t>(label)] -= g;
  };
  return wrap(std::move(n));
}

void backward(const Var& loss) {
  const auto& root = unwrap(loss);
  if (root->value.rows != 1 || root->value.cols != 1)
    throw UsageError("backward: loss must be a 1x1 scalar");

  // iterative post-order topological sort
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack{{root.get(), 0}};
  visited.insert(root.get());
  while (!stack.empty()) {
    auto& [node, idx] = stack.back();
    if (idx < node->parents.size()) {
      Node* p = node->parents[idx++].get();
      if (visited.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root->grad.v[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if ((*it)->backprop) (*it)->backprop(**it);
}

std::vector<double> softmax(const std::vector<double>& logits) {
  if (logits.empty()) throw UsageError("softmax: empty logits");
  double m = logits[0];
  for (double t : logits) m = std::max(m, t);
  double sum = 0.0;
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    sum += out[i];
  }
  for (double& t : out) t /= sum;
  return out;
}

}  // namespace rp
