#pragma once

#include <memory>
#include <vector>

#include "rp/errors.hpp"

namespace rp {

// Dense row-major matrix of doubles.
struct Mat {
  int rows = 0, cols = 0;
  std::vector<double> v;

  Mat() = default;
  Mat(int r, int c, double fill = 0.0)
      : rows(r), cols(c), v(static_cast<std::size_t>(r) * c, fill) {}

  static Mat scalar(double x) {
    Mat m(1, 1);
    m.v[0] = x;
    return m;
  }

  double operator()(int i, int j) const { return v[static_cast<std::size_t>(i) * cols + j]; }
  double& operator()(int i, int j) { return v[static_cast<std::size_t>(i) * cols + j]; }
  bool same_shape(const Mat& o) const { return rows == o.rows && cols == o.cols; }
};

class Var;

namespace detail {
struct Node;
Var wrap(std::shared_ptr<Node> n);
const std::shared_ptr<Node>& unwrap(const Var& v);
}  // namespace detail

// Handle to a node of the reverse-mode tape. Copies share the node.
class Var {
 public:
  Var() = default;

  bool defined() const { return node_ != nullptr; }
  const Mat& value() const;
  Mat& value_mut();  // in-place parameter updates (optimizer)
  const Mat& grad() const;
  void zero_grad();
  int rows() const { return value().rows; }
  int cols() const { return value().cols; }

 private:
  std::shared_ptr<detail::Node> node_;

  friend Var detail::wrap(std::shared_ptr<detail::Node> n);
  friend const std::shared_ptr<detail::Node>& detail::unwrap(const Var& v);
};

using AdjList = std::vector<std::vector<int>>;
using AdjListPtr = std::shared_ptr<const AdjList>;

Var make_leaf(Mat value);

Var add(const Var& a, const Var& b);         // same shape
Var add_rowvec(const Var& x, const Var& b);  // b: 1 x cols, broadcast over rows
Var add_const(const Var& x, double c);
Var scale(const Var& x, double c);
Var scale_by(const Var& x, const Var& s);  // s: 1x1 scalar node
Var matmul(const Var& a, const Var& b);
Var relu(const Var& x);
Var sum_rows(const Var& x);                   // n x c -> 1 x c column sums
Var concat_cols(const std::vector<Var>& xs);  // equal row counts
Var mean_all(const std::vector<Var>& xs);     // elementwise mean, equal shapes
Var aggregate_neighbors(const AdjListPtr& adj, const Var& h);  // out[u] = sum_{v in adj[u]} h[v]
Var softmax_cross_entropy(const Var& logits, int label);  // logits: 1 x C -> 1 x 1 loss

// Accumulates gradients of a 1x1 loss into every reachable node (+=).
// Call zero_grad / ParamStore::zero_grads between uses as needed.
void backward(const Var& loss);

// Numerically stable softmax of a plain vector (inference paths).
std::vector<double> softmax(const std::vector<double>& logits);

}  // namespace rp
