#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "tnp/nn/real_array.hpp"

namespace tnp::nn {

/// Handle to a value recorded on a Tape.
struct Var {
  static constexpr std::size_t kInvalid = std::numeric_limits<std::size_t>::max();
  std::size_t id = kInvalid;
  bool valid() const noexcept { return id != kInvalid; }
};

/// Records matrix operations for one forward pass and replays them in reverse
/// to produce exact gradients of a 1×1 loss.
///
/// Nodes are appended in evaluation order, so the reverse sweep is a single
/// pass over the node list and visits each node once. Only nodes that depend
/// on a variable created with requires_grad carry a backward closure.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  Var constant(RealArray value);
  /// Leaf whose gradient is collected by backward().
  Var variable(RealArray value);

  const RealArray& value(Var v) const;
  /// Gradient after backward(); zeros for variables the loss does not use.
  const RealArray& grad(Var v) const;
  bool requires_grad(Var v) const;
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Reverse sweep from a 1×1 loss. Throws ContractError for non-scalar loss.
  void backward(Var loss);

  Var matmul(Var a, Var b);
  /// a · bᵀ
  Var matmul_bt(Var a, Var b);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var div(Var a, Var b);
  /// a + row broadcast over every row of a.
  Var add_row(Var a, Var row);
  /// a ∘ row broadcast over every row of a.
  Var mul_row(Var a, Var row);
  Var transpose(Var a);
  Var scale(Var a, double factor);
  Var add_scalar(Var a, double offset);
  Var relu(Var a);
  Var softplus(Var a);
  Var log(Var a);
  Var square(Var a);
  Var softmax_rows(Var a);
  /// Column means as a 1×cols row.
  Var mean_rows(Var a);
  Var sum(Var a);
  Var mean(Var a);
  Var concat_cols(std::span<const Var> parts);
  Var concat_rows(std::span<const Var> parts);
  Var slice_cols(Var a, Index start, Index count);
  /// Repeats a 1×1 value into a 1×count row.
  Var repeat(Var scalar, Index count);
  /// Cosine similarity of two 1×n rows as 1×1; defined as 0 when either
  /// row has zero norm (no gradient flows in that case).
  Var cosine(Var a, Var b);

 private:
  using BackwardFn = std::function<void(Tape&, const RealArray& upstream)>;

  struct Node {
    RealArray value;
    RealArray grad;
    bool requires_grad = false;
    BackwardFn backward;
  };

  Var push(RealArray value, bool requires_grad, BackwardFn fn);
  const Node& node(Var v) const;
  bool needs(Var v) const { return nodes_[v.id].requires_grad; }
  template <typename Expr>
  void accumulate(Var v, const Expr& delta) {
    if (nodes_[v.id].requires_grad) nodes_[v.id].grad += delta;
  }

  std::vector<Node> nodes_;
  RealArray empty_;
};

}  // namespace tnp::nn
