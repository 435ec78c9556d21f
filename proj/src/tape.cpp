#include "signn/tape.hpp"

#include <cmath>
#include <utility>

#include "signn/errors.hpp"

namespace signn::num {

GradMode GradMode::surrogate(double width) {
  if (!(width > 0.0)) throw ConfigError("GradMode: surrogate width must be > 0");
  return GradMode(Kind::Surrogate, width);
}

GradMode GradMode::smooth(double steepness) {
  if (!(steepness > 0.0)) throw ConfigError("GradMode: smooth steepness must be > 0");
  return GradMode(Kind::Smooth, steepness);
}

double GradMode::width() const {
  if (kind_ != Kind::Surrogate) throw ConfigError("GradMode: width of a smooth mode");
  return value_;
}

double GradMode::steepness() const {
  if (kind_ != Kind::Smooth) throw ConfigError("GradMode: steepness of a surrogate mode");
  return value_;
}

Var Tape::push(Matrix value, bool requires_grad,
               std::function<void(Tape&, std::uint32_t)> backward) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  if (requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Tape::Node& Tape::node(Var v) { return nodes_.at(v.id); }
const Tape::Node& Tape::node(Var v) const { return nodes_.at(v.id); }

Matrix& Tape::grad_buf(std::uint32_t id) {
  Node& n = nodes_[id];
  if (n.grad.data.empty())
    n.grad = Matrix::zeros(n.value.rows, n.value.cols);
  return n.grad;
}

bool Tape::grad_present(std::uint32_t id) const {
  return !nodes_[id].grad.data.empty();
}

const Matrix& Tape::value(Var v) const { return node(v).value; }

const Matrix& Tape::grad(Var v) const {
  const Node& n = node(v);
  if (!n.grad.data.empty()) return n.grad;
  if (empty_grad_.rows != n.value.rows || empty_grad_.cols != n.value.cols)
    empty_grad_ = Matrix::zeros(n.value.rows, n.value.cols);
  return empty_grad_;
}

void Tape::reset() { nodes_.clear(); }

Var Tape::constant(Matrix v) { return push(std::move(v), false); }

Var Tape::leaf(Matrix v) {
  return push(std::move(v), true, [](Tape&, std::uint32_t) {});
}

Var Tape::param(Param& p) {
  Var v = push(p.value, true, [](Tape&, std::uint32_t) {});
  node(v).bound = &p;
  return v;
}

Var Tape::matmul(Var a, Var b) {
  const Matrix& av = value(a);
  const Matrix& bv = value(b);
  Matrix out = num::matmul(av, bv);
  const bool rg = needs_grad(a) || needs_grad(b);
  return push(std::move(out), rg, [a, b](Tape& t, std::uint32_t self) {
    const Matrix& g = t.nodes_[self].grad;
    if (t.needs_grad(a)) add_matmul_nt(t.grad_buf(a.id), g, t.value(b));
    if (t.needs_grad(b)) add_matmul_tn(t.grad_buf(b.id), t.value(a), g);
  });
}

Var Tape::add(Var a, Var b) {
  Matrix out = num::add(value(a), value(b));
  const bool rg = needs_grad(a) || needs_grad(b);
  return push(std::move(out), rg, [a, b](Tape& t, std::uint32_t self) {
    const Matrix& g = t.nodes_[self].grad;
    for (Var p : {a, b}) {
      if (!t.needs_grad(p)) continue;
      Matrix& gp = t.grad_buf(p.id);
      for (std::size_t i = 0; i < g.data.size(); ++i) gp.data[i] += g.data[i];
    }
  });
}

Var Tape::sub(Var a, Var b) {
  Matrix out = num::sub(value(a), value(b));
  const bool rg = needs_grad(a) || needs_grad(b);
  return push(std::move(out), rg, [a, b](Tape& t, std::uint32_t self) {
    const Matrix& g = t.nodes_[self].grad;
    if (t.needs_grad(a)) {
      Matrix& ga = t.grad_buf(a.id);
      for (std::size_t i = 0; i < g.data.size(); ++i) ga.data[i] += g.data[i];
    }
    if (t.needs_grad(b)) {
      Matrix& gb = t.grad_buf(b.id);
      for (std::size_t i = 0; i < g.data.size(); ++i) gb.data[i] -= g.data[i];
    }
  });
}

Var Tape::mul(Var a, Var b) {
  Matrix out = hadamard(value(a), value(b));
  const bool rg = needs_grad(a) || needs_grad(b);
  return push(std::move(out), rg, [a, b](Tape& t, std::uint32_t self) {
    const Matrix& g = t.nodes_[self].grad;
    if (t.needs_grad(a)) {
      Matrix& ga = t.grad_buf(a.id);
      const Matrix& bv = t.value(b);
      for (std::size_t i = 0; i < g.data.size(); ++i)
        ga.data[i] += g.data[i] * bv.data[i];
    }
    if (t.needs_grad(b)) {
      Matrix& gb = t.grad_buf(b.id);
      const Matrix& av = t.value(a);
      for (std::size_t i = 0; i < g.data.size(); ++i)
        gb.data[i] += g.data[i] * av.data[i];
    }
  });
}

Var Tape::div(Var a, Var b) {
  const Matrix& av = value(a);
  const Matrix& bv = value(b);
  require_same_shape(av, bv, "div");
  Matrix out = av;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] /= bv.data[i];
  const bool rg = needs_grad(a) || needs_grad(b);
  return push(std::move(out), rg, [a, b](Tape& t, std::uint32_t self) {
    const Matrix& g = t.nodes_[self].grad;
    const Matrix& av2 = t.value(a);
    const Matrix& bv2 = t.value(b);
    if (t.needs_grad(a)) {
      Matrix& ga = t.grad_buf(a.id);
      for (std::size_t i = 0; i < g.data.size(); ++i)
        ga.data[i] += g.data[i] / bv2.data[i];
    }
    if (t.needs_grad(b)) {
      Matrix& gb = t.grad_buf(b.id);
      for (std::size_t i = 0; i < g.data.size(); ++i)
        gb.data[i] -= g.data[i] * av2.data[i] / (bv2.data[i] * bv2.data[i]);
    }
  });
}

Var Tape::add_scalar(Var a, double c) {
  Matrix out = value(a);
  for (double& v : out.data) v += c;
  return push(std::move(out), needs_grad(a), [a](Tape& t, std::uint32_t self) {
    if (!t.needs_grad(a)) return;
    const Matrix& g = t.nodes_[self].grad;
    Matrix& ga = t.grad_buf(a.id);
    for (std::size_t i = 0; i < g.data.size(); ++i) ga.data[i] += g.data[i];
  });
}

Var Tape::mul_scalar(Var a, double c) {
  Matrix out = scale(value(a), c);
  return push(std::move(out), needs_grad(a), [a, c](Tape& t, std::uint32_t self) {
    if (!t.needs_grad(a)) return;
    const Matrix& g = t.nodes_[self].grad;
    Matrix& ga = t.grad_buf(a.id);
    for (std::size_t i = 0; i < g.data.size(); ++i) ga.data[i] += c * g.data[i];
  });
}

Var Tape::scalar_mul(Var s, Var a) {
  const Matrix& sv = value(s);
  if (sv.size() != 1)
    throw DimensionError("scalar_mul: scalar operand is " + sv.shape_str());
  Matrix out = scale(value(a), sv.data[0]);
  const bool rg = needs_grad(s) || needs_grad(a);
  return push(std::move(out), rg, [s, a](Tape& t, std::uint32_t self) {
    const Matrix& g = t.nodes_[self].grad;
    const double sval = t.value(s).data[0];
    if (t.needs_grad(a)) {
      Matrix& ga = t.grad_buf(a.id);
      for (std::size_t i = 0; i < g.data.size(); ++i)
        ga.data[i] += sval * g.data[i];
    }
    if (t.needs_grad(s)) {
      const Matrix& av = t.value(a);
      double acc = 0.0;
      for (std::size_t i = 0; i < g.data.size(); ++i)
        acc += g.data[i] * av.data[i];
      t.grad_buf(s.id).data[0] += acc;
    }
  });
}

Var Tape::sigmoid(Var a) {
  Matrix out = num::sigmoid(value(a));
  return push(std::move(out), needs_grad(a), [a](Tape& t, std::uint32_t self) {
    if (!t.needs_grad(a)) return;
    const Matrix& g = t.nodes_[self].grad;
    const Matrix& y = t.nodes_[self].value;
    Matrix& ga = t.grad_buf(a.id);
    for (std::size_t i = 0; i < g.data.size(); ++i)
      ga.data[i] += g.data[i] * y.data[i] * (1.0 - y.data[i]);
  });
}

Var Tape::tanh(Var a) {
  Matrix out = value(a);
  for (double& v : out.data) v = std::tanh(v);
  return push(std::move(out), needs_grad(a), [a](Tape& t, std::uint32_t self) {
    if (!t.needs_grad(a)) return;
    const Matrix& g = t.nodes_[self].grad;
    const Matrix& y = t.nodes_[self].value;
    Matrix& ga = t.grad_buf(a.id);
    for (std::size_t i = 0; i < g.data.size(); ++i)
      ga.data[i] += g.data[i] * (1.0 - y.data[i] * y.data[i]);
  });
}

Var Tape::exp(Var a) {
  Matrix out = value(a);
  for (double& v : out.data) v = std::exp(v);
  return push(std::move(out), needs_grad(a), [a](Tape& t, std::uint32_t self) {
    if (!t.needs_grad(a)) return;
    const Matrix& g = t.nodes_[self].grad;
    const Matrix& y = t.nodes_[self].value;
    Matrix& ga = t.grad_buf(a.id);
    for (std::size_t i = 0; i < g.data.size(); ++i)
      ga.data[i] += g.data[i] * y.data[i];
  });
}

Var Tape::heaviside(Var a, const GradMode& mode) {
  const Matrix& av = value(a);
  Matrix out(av.rows, av.cols);
  if (mode.is_smooth()) {
    const double k = mode.steepness();
    for (std::size_t i = 0; i < av.data.size(); ++i)
      out.data[i] = sigmoid_scalar(k * av.data[i]);
  } else {
    for (std::size_t i = 0; i < av.data.size(); ++i)
      out.data[i] = av.data[i] >= 0.0 ? 1.0 : 0.0;
  }
  const GradMode m = mode;
  return push(std::move(out), needs_grad(a), [a, m](Tape& t, std::uint32_t self) {
    if (!t.needs_grad(a)) return;
    const Matrix& g = t.nodes_[self].grad;
    Matrix& ga = t.grad_buf(a.id);
    if (m.is_smooth()) {
      const double k = m.steepness();
      const Matrix& y = t.nodes_[self].value;
      for (std::size_t i = 0; i < g.data.size(); ++i)
        ga.data[i] += g.data[i] * k * y.data[i] * (1.0 - y.data[i]);
    } else {
      const double w = m.width();
      const Matrix& x = t.value(a);
      for (std::size_t i = 0; i < g.data.size(); ++i)
        if (std::fabs(x.data[i]) <= 0.5 * w) ga.data[i] += g.data[i] / w;
    }
  });
}

Var Tape::stop_gradient(Var a) { return constant(value(a)); }

Var Tape::sum(Var a) {
  double acc = 0.0;
  for (double v : value(a).data) acc += v;
  return push(Matrix::scalar(acc), needs_grad(a), [a](Tape& t, std::uint32_t self) {
    if (!t.needs_grad(a)) return;
    const double g = t.nodes_[self].grad.data[0];
    Matrix& ga = t.grad_buf(a.id);
    for (double& v : ga.data) v += g;
  });
}

Var Tape::row_sum(Var a) {
  const Matrix& av = value(a);
  Matrix out(av.rows, 1);
  for (std::size_t i = 0; i < av.rows; ++i) {
    double acc = 0.0;
    const double* row = av.row_ptr(i);
    for (std::size_t j = 0; j < av.cols; ++j) acc += row[j];
    out(i, 0) = acc;
  }
  return push(std::move(out), needs_grad(a), [a](Tape& t, std::uint32_t self) {
    if (!t.needs_grad(a)) return;
    const Matrix& g = t.nodes_[self].grad;
    Matrix& ga = t.grad_buf(a.id);
    for (std::size_t i = 0; i < ga.rows; ++i) {
      double* row = ga.row_ptr(i);
      for (std::size_t j = 0; j < ga.cols; ++j) row[j] += g(i, 0);
    }
  });
}

Var Tape::gather_rows(Var a, std::vector<std::size_t> ids) {
  const Matrix& av = value(a);
  Matrix out(ids.size(), av.cols);
  for (std::size_t k = 0; k < ids.size(); ++k) {
    if (ids[k] >= av.rows)
      throw RangeError("gather_rows: row " + std::to_string(ids[k]) +
                       " out of range for " + av.shape_str());
    std::copy_n(av.row_ptr(ids[k]), av.cols, out.row_ptr(k));
  }
  auto shared = std::make_shared<std::vector<std::size_t>>(std::move(ids));
  return push(std::move(out), needs_grad(a),
              [a, shared](Tape& t, std::uint32_t self) {
                if (!t.needs_grad(a)) return;
                const Matrix& g = t.nodes_[self].grad;
                Matrix& ga = t.grad_buf(a.id);
                for (std::size_t k = 0; k < shared->size(); ++k) {
                  double* dst = ga.row_ptr((*shared)[k]);
                  const double* src = g.row_ptr(k);
                  for (std::size_t j = 0; j < g.cols; ++j) dst[j] += src[j];
                }
              });
}

Var Tape::neighbor_mean(
    Var h, std::shared_ptr<const std::vector<std::vector<std::size_t>>> samples) {
  const Matrix& hv = value(h);
  Matrix out(samples->size(), hv.cols);
  for (std::size_t i = 0; i < samples->size(); ++i) {
    const auto& ids = (*samples)[i];
    if (ids.empty()) throw ConfigError("neighbor_mean: empty sample list");
    double* dst = out.row_ptr(i);
    for (std::size_t id : ids) {
      if (id >= hv.rows)
        throw RangeError("neighbor_mean: node " + std::to_string(id) +
                         " out of range for " + hv.shape_str());
      const double* src = hv.row_ptr(id);
      for (std::size_t j = 0; j < hv.cols; ++j) dst[j] += src[j];
    }
    const double inv = 1.0 / static_cast<double>(ids.size());
    for (std::size_t j = 0; j < hv.cols; ++j) dst[j] *= inv;
  }
  return push(std::move(out), needs_grad(h),
              [h, samples](Tape& t, std::uint32_t self) {
                if (!t.needs_grad(h)) return;
                const Matrix& g = t.nodes_[self].grad;
                Matrix& gh = t.grad_buf(h.id);
                for (std::size_t i = 0; i < samples->size(); ++i) {
                  const auto& ids = (*samples)[i];
                  const double inv = 1.0 / static_cast<double>(ids.size());
                  const double* src = g.row_ptr(i);
                  for (std::size_t id : ids) {
                    double* dst = gh.row_ptr(id);
                    for (std::size_t j = 0; j < g.cols; ++j)
                      dst[j] += inv * src[j];
                  }
                }
              });
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw ConfigError("concat_cols: empty list");
  const std::size_t rows = value(parts[0]).rows;
  std::size_t cols = 0;
  bool rg = false;
  for (Var p : parts) {
    const Matrix& pv = value(p);
    if (pv.rows != rows)
      throw DimensionError("concat_cols: row mismatch " + pv.shape_str() +
                           " vs " + value(parts[0]).shape_str());
    cols += pv.cols;
    rg = rg || needs_grad(p);
  }
  Matrix out(rows, cols);
  std::size_t off = 0;
  for (Var p : parts) {
    const Matrix& pv = value(p);
    for (std::size_t i = 0; i < rows; ++i)
      std::copy_n(pv.row_ptr(i), pv.cols, out.row_ptr(i) + off);
    off += pv.cols;
  }
  std::vector<Var> ps = parts;
  return push(std::move(out), rg, [ps](Tape& t, std::uint32_t self) {
    const Matrix& g = t.nodes_[self].grad;
    std::size_t off = 0;
    for (Var p : ps) {
      const std::size_t pc = t.value(p).cols;
      if (t.needs_grad(p)) {
        Matrix& gp = t.grad_buf(p.id);
        for (std::size_t i = 0; i < g.rows; ++i) {
          const double* src = g.row_ptr(i) + off;
          double* dst = gp.row_ptr(i);
          for (std::size_t j = 0; j < pc; ++j) dst[j] += src[j];
        }
      }
      off += pc;
    }
  });
}

Var Tape::add_row_broadcast(Var x, Var b) {
  const Matrix& xv = value(x);
  const Matrix& bv = value(b);
  if (bv.rows != 1 || bv.cols != xv.cols)
    throw DimensionError("add_row_broadcast: " + xv.shape_str() + " + " +
                         bv.shape_str());
  Matrix out = xv;
  for (std::size_t i = 0; i < xv.rows; ++i) {
    double* row = out.row_ptr(i);
    for (std::size_t j = 0; j < xv.cols; ++j) row[j] += bv.data[j];
  }
  const bool rg = needs_grad(x) || needs_grad(b);
  return push(std::move(out), rg, [x, b](Tape& t, std::uint32_t self) {
    const Matrix& g = t.nodes_[self].grad;
    if (t.needs_grad(x)) {
      Matrix& gx = t.grad_buf(x.id);
      for (std::size_t i = 0; i < g.data.size(); ++i) gx.data[i] += g.data[i];
    }
    if (t.needs_grad(b)) {
      Matrix& gb = t.grad_buf(b.id);
      for (std::size_t i = 0; i < g.rows; ++i) {
        const double* row = g.row_ptr(i);
        for (std::size_t j = 0; j < g.cols; ++j) gb.data[j] += row[j];
      }
    }
  });
}

Var Tape::row_scale(Var x, Var w) {
  const Matrix& xv = value(x);
  const Matrix& wv = value(w);
  if (wv.cols != 1 || wv.rows != xv.rows)
    throw DimensionError("row_scale: " + xv.shape_str() + " by " + wv.shape_str());
  Matrix out = xv;
  for (std::size_t i = 0; i < xv.rows; ++i) {
    double* row = out.row_ptr(i);
    for (std::size_t j = 0; j < xv.cols; ++j) row[j] *= wv(i, 0);
  }
  const bool rg = needs_grad(x) || needs_grad(w);
  return push(std::move(out), rg, [x, w](Tape& t, std::uint32_t self) {
    const Matrix& g = t.nodes_[self].grad;
    const Matrix& xv2 = t.value(x);
    const Matrix& wv2 = t.value(w);
    if (t.needs_grad(x)) {
      Matrix& gx = t.grad_buf(x.id);
      for (std::size_t i = 0; i < g.rows; ++i) {
        double* dst = gx.row_ptr(i);
        const double* src = g.row_ptr(i);
        for (std::size_t j = 0; j < g.cols; ++j) dst[j] += src[j] * wv2(i, 0);
      }
    }
    if (t.needs_grad(w)) {
      Matrix& gw = t.grad_buf(w.id);
      for (std::size_t i = 0; i < g.rows; ++i) {
        const double* src = g.row_ptr(i);
        const double* xr = xv2.row_ptr(i);
        double acc = 0.0;
        for (std::size_t j = 0; j < g.cols; ++j) acc += src[j] * xr[j];
        gw(i, 0) += acc;
      }
    }
  });
}

Var Tape::pool_step(Var h, Var pool, std::size_t t_col) {
  const Matrix& hv = value(h);
  const Matrix& pv = value(pool);
  if (pv.rows != hv.cols || t_col >= pv.cols)
    throw DimensionError("pool_step: embeddings " + hv.shape_str() +
                         " vs pool " + pv.shape_str() + " col " +
                         std::to_string(t_col));
  Matrix out = hv;
  for (std::size_t i = 0; i < hv.rows; ++i) {
    double* row = out.row_ptr(i);
    for (std::size_t j = 0; j < hv.cols; ++j) row[j] *= pv(j, t_col);
  }
  const bool rg = needs_grad(h) || needs_grad(pool);
  return push(std::move(out), rg, [h, pool, t_col](Tape& t, std::uint32_t self) {
    const Matrix& g = t.nodes_[self].grad;
    const Matrix& hv2 = t.value(h);
    const Matrix& pv2 = t.value(pool);
    if (t.needs_grad(h)) {
      Matrix& gh = t.grad_buf(h.id);
      for (std::size_t i = 0; i < g.rows; ++i) {
        double* dst = gh.row_ptr(i);
        const double* src = g.row_ptr(i);
        for (std::size_t j = 0; j < g.cols; ++j) dst[j] += src[j] * pv2(j, t_col);
      }
    }
    if (t.needs_grad(pool)) {
      Matrix& gp = t.grad_buf(pool.id);
      for (std::size_t j = 0; j < g.cols; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < g.rows; ++i) acc += g(i, j) * hv2(i, j);
        gp(j, t_col) += acc;
      }
    }
  });
}

Var Tape::max_elem(Var a, Var b) {
  const Matrix& av = value(a);
  const Matrix& bv = value(b);
  require_same_shape(av, bv, "max_elem");
  Matrix out = av;
  for (std::size_t i = 0; i < out.data.size(); ++i)
    out.data[i] = av.data[i] >= bv.data[i] ? av.data[i] : bv.data[i];
  const bool rg = needs_grad(a) || needs_grad(b);
  // ties route to the first operand
  return push(std::move(out), rg, [a, b](Tape& t, std::uint32_t self) {
    const Matrix& g = t.nodes_[self].grad;
    const Matrix& av2 = t.value(a);
    const Matrix& bv2 = t.value(b);
    for (std::size_t i = 0; i < g.data.size(); ++i) {
      const bool first = av2.data[i] >= bv2.data[i];
      Var target = first ? a : b;
      if (t.needs_grad(target)) t.grad_buf(target.id).data[i] += g.data[i];
    }
  });
}

Var Tape::cross_entropy(Var scores, std::vector<std::size_t> labels) {
  const Matrix& sv = value(scores);
  if (labels.size() != sv.rows)
    throw DimensionError("cross_entropy: " + std::to_string(labels.size()) +
                         " labels for " + sv.shape_str() + " scores");
  for (std::size_t lab : labels)
    if (lab >= sv.cols)
      throw RangeError("cross_entropy: label " + std::to_string(lab) +
                       " >= class count " + std::to_string(sv.cols));
  auto probs = std::make_shared<Matrix>(sv.rows, sv.cols);
  double loss = 0.0;
  for (std::size_t i = 0; i < sv.rows; ++i) {
    const double* row = sv.row_ptr(i);
    double mx = row[0];
    for (std::size_t j = 1; j < sv.cols; ++j) mx = std::max(mx, row[j]);
    double denom = 0.0;
    for (std::size_t j = 0; j < sv.cols; ++j) denom += std::exp(row[j] - mx);
    const double log_denom = std::log(denom);
    loss += -(row[labels[i]] - mx) + log_denom;
    double* prow = probs->row_ptr(i);
    for (std::size_t j = 0; j < sv.cols; ++j)
      prow[j] = std::exp(row[j] - mx) / denom;
  }
  loss /= static_cast<double>(sv.rows);
  auto labs = std::make_shared<std::vector<std::size_t>>(std::move(labels));
  return push(Matrix::scalar(loss), needs_grad(scores),
              [scores, probs, labs](Tape& t, std::uint32_t self) {
                if (!t.needs_grad(scores)) return;
                const double g = t.nodes_[self].grad.data[0];
                Matrix& gs = t.grad_buf(scores.id);
                const double inv_b = 1.0 / static_cast<double>(gs.rows);
                for (std::size_t i = 0; i < gs.rows; ++i) {
                  double* dst = gs.row_ptr(i);
                  const double* p = probs->row_ptr(i);
                  for (std::size_t j = 0; j < gs.cols; ++j)
                    dst[j] += g * inv_b * (p[j] - (j == (*labs)[i] ? 1.0 : 0.0));
                }
              });
}

void Tape::backward(Var loss) {
  const Matrix& lv = value(loss);
  if (lv.size() != 1)
    throw DimensionError("backward: loss is " + lv.shape_str() + ", want 1x1");
  if (!std::isfinite(lv.data[0]))
    throw NumericError("backward: loss is not finite");
  grad_buf(loss.id).data[0] = 1.0;
  for (std::uint32_t i = static_cast<std::uint32_t>(nodes_.size()); i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || !n.backward) continue;
    if (!grad_present(i)) continue;  // no gradient ever reached this node
    n.backward(*this, i);
  }
  for (std::uint32_t i = 0; i < nodes_.size(); ++i) {
    Node& n = nodes_[i];
    if (n.bound && grad_present(i)) {
      Matrix& pg = n.bound->grad;
      for (std::size_t k = 0; k < pg.data.size(); ++k)
        pg.data[k] += n.grad.data[k];
    }
  }
}

}  // namespace signn::num
