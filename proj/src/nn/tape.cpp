#include "tnp/nn/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <spdlog/spdlog.h>

#include "tnp/errors.hpp"

namespace tnp::nn {

namespace {

void require_same_shape(const RealArray& a, const RealArray& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ConfigError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                      std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                      std::to_string(b.cols()));
  }
}

void require_row(const RealArray& a, const RealArray& row, const char* op) {
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw ConfigError(std::string(op) + ": expected a 1x" + std::to_string(a.cols()) + " row");
  }
}

}  // namespace

Var Tape::push(RealArray value, bool requires_grad, BackwardFn fn) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  if (requires_grad) n.backward = std::move(fn);
  nodes_.push_back(std::move(n));
  return Var{nodes_.size() - 1};
}

const Tape::Node& Tape::node(Var v) const {
  if (!v.valid() || v.id >= nodes_.size()) throw ContractError("tape: invalid variable handle");
  return nodes_[v.id];
}

Var Tape::constant(RealArray value) { return push(std::move(value), false, nullptr); }

Var Tape::variable(RealArray value) { return push(std::move(value), true, nullptr); }

const RealArray& Tape::value(Var v) const { return node(v).value; }

const RealArray& Tape::grad(Var v) const {
  const Node& n = node(v);
  return n.requires_grad ? n.grad : empty_;
}

bool Tape::requires_grad(Var v) const { return node(v).requires_grad; }

void Tape::backward(Var loss) {
  const Node& l = node(loss);
  if (l.value.rows() != 1 || l.value.cols() != 1) {
    throw ContractError("backward: loss must be a 1x1 scalar");
  }
  for (Node& n : nodes_) {
    if (n.requires_grad) n.grad = RealArray::Zero(n.value.rows(), n.value.cols());
  }
  if (!nodes_[loss.id].requires_grad) return;
  nodes_[loss.id].grad(0, 0) = 1.0;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.requires_grad && n.backward) {
      // The closure only writes into earlier nodes, so this reference stays valid.
      n.backward(*this, n.grad);
    }
  }
}

Var Tape::matmul(Var a, Var b) {
  const RealArray& av = value(a);
  const RealArray& bv = value(b);
  if (av.cols() != bv.rows()) throw ConfigError("matmul: inner dimensions differ");
  return push(av * bv, needs(a) || needs(b), [a, b](Tape& t, const RealArray& g) {
    if (t.needs(a)) t.accumulate(a, g * t.nodes_[b.id].value.transpose());
    if (t.needs(b)) t.accumulate(b, t.nodes_[a.id].value.transpose() * g);
  });
}

Var Tape::matmul_bt(Var a, Var b) {
  const RealArray& av = value(a);
  const RealArray& bv = value(b);
  if (av.cols() != bv.cols()) throw ConfigError("matmul_bt: inner dimensions differ");
  return push(av * bv.transpose(), needs(a) || needs(b), [a, b](Tape& t, const RealArray& g) {
    if (t.needs(a)) t.accumulate(a, g * t.nodes_[b.id].value);
    if (t.needs(b)) t.accumulate(b, g.transpose() * t.nodes_[a.id].value);
  });
}

Var Tape::add(Var a, Var b) {
  require_same_shape(value(a), value(b), "add");
  return push(value(a) + value(b), needs(a) || needs(b), [a, b](Tape& t, const RealArray& g) {
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

Var Tape::sub(Var a, Var b) {
  require_same_shape(value(a), value(b), "sub");
  return push(value(a) - value(b), needs(a) || needs(b), [a, b](Tape& t, const RealArray& g) {
    t.accumulate(a, g);
    t.accumulate(b, -g);
  });
}

Var Tape::mul(Var a, Var b) {
  require_same_shape(value(a), value(b), "mul");
  return push(value(a).cwiseProduct(value(b)), needs(a) || needs(b),
              [a, b](Tape& t, const RealArray& g) {
                if (t.needs(a)) t.accumulate(a, g.cwiseProduct(t.nodes_[b.id].value));
                if (t.needs(b)) t.accumulate(b, g.cwiseProduct(t.nodes_[a.id].value));
              });
}

Var Tape::div(Var a, Var b) {
  require_same_shape(value(a), value(b), "div");
  return push(value(a).cwiseQuotient(value(b)), needs(a) || needs(b),
              [a, b](Tape& t, const RealArray& g) {
                const RealArray& bv = t.nodes_[b.id].value;
                if (t.needs(a)) t.accumulate(a, g.cwiseQuotient(bv));
                if (t.needs(b)) {
                  const RealArray& av = t.nodes_[a.id].value;
                  t.accumulate(b, -g.cwiseProduct(av).cwiseQuotient(bv.cwiseProduct(bv)));
                }
              });
}

Var Tape::add_row(Var a, Var row) {
  require_row(value(a), value(row), "add_row");
  RealArray out = value(a).rowwise() + value(row).row(0);
  return push(std::move(out), needs(a) || needs(row), [a, row](Tape& t, const RealArray& g) {
    t.accumulate(a, g);
    if (t.needs(row)) t.accumulate(row, g.colwise().sum());
  });
}

Var Tape::mul_row(Var a, Var row) {
  require_row(value(a), value(row), "mul_row");
  RealArray out = value(a).array().rowwise() * value(row).row(0).array();
  return push(std::move(out), needs(a) || needs(row), [a, row](Tape& t, const RealArray& g) {
    if (t.needs(a)) {
      RealArray da = g.array().rowwise() * t.nodes_[row.id].value.row(0).array();
      t.accumulate(a, da);
    }
    if (t.needs(row)) t.accumulate(row, g.cwiseProduct(t.nodes_[a.id].value).colwise().sum());
  });
}

Var Tape::transpose(Var a) {
  RealArray out = value(a).transpose();
  return push(std::move(out), needs(a),
              [a](Tape& t, const RealArray& g) { t.accumulate(a, g.transpose()); });
}

Var Tape::scale(Var a, double factor) {
  return push(value(a) * factor, needs(a),
              [a, factor](Tape& t, const RealArray& g) { t.accumulate(a, g * factor); });
}

Var Tape::add_scalar(Var a, double offset) {
  RealArray out = value(a).array() + offset;
  return push(std::move(out), needs(a), [a](Tape& t, const RealArray& g) { t.accumulate(a, g); });
}

Var Tape::relu(Var a) {
  return push(value(a).cwiseMax(0.0), needs(a), [a](Tape& t, const RealArray& g) {
    const RealArray& av = t.nodes_[a.id].value;
    t.accumulate(a, (av.array() > 0.0).select(g, 0.0));
  });
}

Var Tape::softplus(Var a) {
  // log(1 + e^x) = max(x, 0) + log1p(e^{-|x|})
  RealArray out = value(a).unaryExpr(
      [](double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); });
  return push(std::move(out), needs(a), [a](Tape& t, const RealArray& g) {
    RealArray sig = t.nodes_[a.id].value.unaryExpr([](double x) {
      return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    });
    t.accumulate(a, g.cwiseProduct(sig));
  });
}

Var Tape::log(Var a) {
  RealArray out = value(a).array().log();
  return push(std::move(out), needs(a), [a](Tape& t, const RealArray& g) {
    t.accumulate(a, g.cwiseQuotient(t.nodes_[a.id].value));
  });
}

Var Tape::square(Var a) {
  return push(value(a).cwiseAbs2(), needs(a), [a](Tape& t, const RealArray& g) {
    t.accumulate(a, 2.0 * g.cwiseProduct(t.nodes_[a.id].value));
  });
}

Var Tape::softmax_rows(Var a) {
  const RealArray& av = value(a);
  RealArray out(av.rows(), av.cols());
  for (Index i = 0; i < av.rows(); ++i) {
    const double top = av.row(i).maxCoeff();
    out.row(i) = (av.row(i).array() - top).exp().matrix();
    out.row(i) /= out.row(i).sum();
  }
  const Var self{nodes_.size()};
  return push(std::move(out), needs(a), [a, self](Tape& t, const RealArray& g) {
    const RealArray& s = t.nodes_[self.id].value;
    Eigen::VectorXd inner = g.cwiseProduct(s).rowwise().sum();
    RealArray da = s.cwiseProduct(g.colwise() - inner);
    t.accumulate(a, da);
  });
}

Var Tape::mean_rows(Var a) {
  const RealArray& av = value(a);
  if (av.rows() == 0) throw ContractError("mean_rows: empty input");
  RealArray out = av.colwise().mean();
  const double n = static_cast<double>(av.rows());
  return push(std::move(out), needs(a), [a, n](Tape& t, const RealArray& g) {
    const Index rows = t.nodes_[a.id].value.rows();
    t.accumulate(a, g.replicate(rows, 1) / n);
  });
}

Var Tape::sum(Var a) {
  RealArray out(1, 1);
  out(0, 0) = value(a).sum();
  return push(std::move(out), needs(a), [a](Tape& t, const RealArray& g) {
    t.nodes_[a.id].grad.array() += g(0, 0);
  });
}

Var Tape::mean(Var a) {
  const double n = static_cast<double>(value(a).size());
  if (n == 0) throw ContractError("mean: empty input");
  return scale(sum(a), 1.0 / n);
}

Var Tape::concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("concat_cols: no inputs");
  const Index rows = value(parts[0]).rows();
  Index cols = 0;
  bool rg = false;
  for (Var p : parts) {
    if (value(p).rows() != rows) throw ConfigError("concat_cols: row counts differ");
    cols += value(p).cols();
    rg = rg || needs(p);
  }
  RealArray out(rows, cols);
  Index offset = 0;
  for (Var p : parts) {
    out.middleCols(offset, value(p).cols()) = value(p);
    offset += value(p).cols();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return push(std::move(out), rg, [inputs](Tape& t, const RealArray& g) {
    Index off = 0;
    for (Var p : inputs) {
      const Index c = t.nodes_[p.id].value.cols();
      if (t.needs(p)) t.accumulate(p, g.middleCols(off, c));
      off += c;
    }
  });
}

Var Tape::concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("concat_rows: no inputs");
  const Index cols = value(parts[0]).cols();
  Index rows = 0;
  bool rg = false;
  for (Var p : parts) {
    if (value(p).cols() != cols) throw ConfigError("concat_rows: column counts differ");
    rows += value(p).rows();
    rg = rg || needs(p);
  }
  RealArray out(rows, cols);
  Index offset = 0;
  for (Var p : parts) {
    out.middleRows(offset, value(p).rows()) = value(p);
    offset += value(p).rows();
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return push(std::move(out), rg, [inputs](Tape& t, const RealArray& g) {
    Index off = 0;
    for (Var p : inputs) {
      const Index r = t.nodes_[p.id].value.rows();
      if (t.needs(p)) t.accumulate(p, g.middleRows(off, r));
      off += r;
    }
  });
}

Var Tape::slice_cols(Var a, Index start, Index count) {
  const RealArray& av = value(a);
  if (start < 0 || count < 0 || start + count > av.cols()) {
    throw ConfigError("slice_cols: range out of bounds");
  }
  RealArray out = av.middleCols(start, count);
  return push(std::move(out), needs(a), [a, start, count](Tape& t, const RealArray& g) {
    t.nodes_[a.id].grad.middleCols(start, count) += g;
  });
}

Var Tape::repeat(Var scalar, Index count) {
  const RealArray& sv = value(scalar);
  if (sv.rows() != 1 || sv.cols() != 1) throw ConfigError("repeat: expected a 1x1 input");
  RealArray out = RealArray::Constant(1, count, sv(0, 0));
  return push(std::move(out), needs(scalar), [scalar](Tape& t, const RealArray& g) {
    t.nodes_[scalar.id].grad(0, 0) += g.sum();
  });
}

Var Tape::cosine(Var a, Var b) {
  const RealArray& av = value(a);
  const RealArray& bv = value(b);
  if (av.rows() != 1) throw ConfigError("cosine: expected 1xn rows");
  require_same_shape(av, bv, "cosine");
  const double na = av.norm();
  const double nb = bv.norm();
  RealArray out = RealArray::Zero(1, 1);
  if (na == 0.0 || nb == 0.0) {
    spdlog::warn("cosine similarity of a zero-norm mean embedding; using 0");
    return push(std::move(out), false, nullptr);
  }
  const double c = av.row(0).dot(bv.row(0)) / (na * nb);
  out(0, 0) = c;
  return push(std::move(out), needs(a) || needs(b), [a, b, na, nb, c](Tape& t, const RealArray& g) {
    const RealArray& x = t.nodes_[a.id].value;
    const RealArray& y = t.nodes_[b.id].value;
    const double up = g(0, 0);
    if (t.needs(a)) t.accumulate(a, up * (y / (na * nb) - c * x / (na * na)));
    if (t.needs(b)) t.accumulate(b, up * (x / (na * nb) - c * y / (nb * nb)));
  });
}

}  // namespace tnp::nn
