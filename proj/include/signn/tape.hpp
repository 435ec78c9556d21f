#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "signn/matrix.hpp"

namespace signn::num {

/// How gradients cross the spike nonlinearity.
///
/// Surrogate: hard Heaviside forward ({0,1}-valued), rectangular window of
/// the given width as the backward rule.  Training mode.
///
/// Smooth: sigmoid(steepness * x) forward with its exact derivative, so the
/// whole computation is differentiable and can be checked against finite
/// differences.  Verification mode only.
class GradMode {
 public:
  enum class Kind { Surrogate, Smooth };

  static GradMode surrogate(double width = 1.0);
  static GradMode smooth(double steepness);

  Kind kind() const { return kind_; }
  bool is_smooth() const { return kind_ == Kind::Smooth; }
  double width() const;      // Surrogate only
  double steepness() const;  // Smooth only

 private:
  GradMode(Kind k, double v) : kind_(k), value_(v) {}
  Kind kind_;
  double value_;
};

/// A named trainable tensor.  grad has the same shape as value and is
/// accumulated by Tape::backward for every tape the param was bound to.
struct Param {
  std::string name;
  Matrix value;
  Matrix grad;

  Param() = default;
  Param(std::string n, Matrix v)
      : name(std::move(n)), value(std::move(v)),
        grad(value.rows, value.cols, 0.0) {}

  void reset_grad() { std::fill(grad.data.begin(), grad.data.end(), 0.0); }
};

/// Handle to a tape node.
struct Var {
  std::uint32_t id = UINT32_MAX;
  bool valid() const { return id != UINT32_MAX; }
};

/// Dynamic reverse-mode tape, rebuilt each forward pass.  Node order is
/// creation order, which is a topological order, so the backward sweep is a
/// single reverse walk.  One tape is owned by one training pass; values are
/// immutable once written.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Gradient does not flow into constants.
  Var constant(Matrix v);
  /// Grad-tracked leaf; gradient readable via grad() after backward().
  Var leaf(Matrix v);
  /// Leaf bound to a Param: backward() adds the node gradient into p.grad.
  Var param(Param& p);

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);  // elementwise
  Var div(Var a, Var b);  // elementwise
  Var add_scalar(Var a, double c);
  Var mul_scalar(Var a, double c);
  /// Broadcast multiply by a 1x1 var (e.g. a learnable decay factor).
  Var scalar_mul(Var s, Var a);
  Var sigmoid(Var a);
  Var tanh(Var a);
  Var exp(Var a);
  /// Spike detection: forward/backward as described on GradMode.
  Var heaviside(Var a, const GradMode& mode);
  /// Identity forward, zero backward.
  Var stop_gradient(Var a);
  Var sum(Var a);      // -> 1x1
  Var row_sum(Var a);  // (r x c) -> (r x 1)
  Var gather_rows(Var a, std::vector<std::size_t> ids);
  /// out(i,:) = mean of h(id,:) over ids in samples[i]; lists must be nonempty.
  Var neighbor_mean(Var h, std::shared_ptr<const std::vector<std::vector<std::size_t>>> samples);
  Var concat_cols(const std::vector<Var>& parts);
  /// x (n x d) + b (1 x d), bias broadcast over rows.
  Var add_row_broadcast(Var x, Var b);
  /// out(i,:) = x(i,:) * w(i,0); w is (n x 1).
  Var row_scale(Var x, Var w);
  /// out(i,j) = h(i,j) * pool(j,t); the column-t slice of a pooling matrix
  /// applied to one step's embeddings.
  Var pool_step(Var h, Var pool, std::size_t t);
  Var max_elem(Var a, Var b);
  /// Mean negative log softmax likelihood, max-subtraction stabilized -> 1x1.
  Var cross_entropy(Var scores, std::vector<std::size_t> labels);

  /// Seeds d(loss)=1, sweeps the tape in reverse, then flushes gradients of
  /// bound params.  loss must be 1x1 and finite.
  void backward(Var loss);

  const Matrix& value(Var v) const;
  /// Gradient buffer of a node (zeros if it never received gradient).
  const Matrix& grad(Var v) const;

  std::size_t size() const { return nodes_.size(); }
  void reset();

 private:
  struct Node {
    Matrix value;
    Matrix grad;  // allocated lazily during backward
    bool requires_grad = false;
    std::function<void(Tape&, std::uint32_t)> backward;
    Param* bound = nullptr;
  };

  std::vector<Node> nodes_;
  mutable Matrix empty_grad_;

  Var push(Matrix value, bool requires_grad,
           std::function<void(Tape&, std::uint32_t)> backward = nullptr);
  Node& node(Var v);
  const Node& node(Var v) const;
  bool needs_grad(Var v) const { return node(v).requires_grad; }
  /// Accumulation target for a parent; allocates zeros on first touch.
  Matrix& grad_buf(std::uint32_t id);
  bool grad_present(std::uint32_t id) const;
};

}  // namespace signn::num
