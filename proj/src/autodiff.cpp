#include "coloke/autodiff.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace coloke::ad {

std::size_t ParamVector::add_block(std::size_t rows, std::size_t cols) {
  Block b;
  b.offset = values.size();
  b.rows = rows;
  b.cols = cols;
  blocks.push_back(b);
  values.resize(values.size() + rows * cols, 0.0);
  return blocks.size() - 1;
}

bool ParamVector::layout_consistent() const {
  std::size_t expect = 0;
  for (const Block& b : blocks) {
    if (b.offset != expect) return false;
    expect += b.rows * b.cols;
  }
  return expect == values.size();
}

void Tape::reset(const ParamVector* params) {
  params_ = params;
  nodes_.clear();
  arena_.clear();
  sum_operands_.clear();
}

int Tape::push(Node n, std::size_t len) {
  n.val_off = arena_.size();
  n.len = len;
  arena_.resize(arena_.size() + len, 0.0);
  nodes_.push_back(n);
  return static_cast<int>(nodes_.size()) - 1;
}

std::span<const double> Tape::value(int id) const {
  const Node& n = nodes_.at(id);
  return {arena_.data() + n.val_off, n.len};
}

std::span<double> Tape::mut_value(int id) {
  const Node& n = nodes_[id];
  return {arena_.data() + n.val_off, n.len};
}

double Tape::scalar_value(int id) const {
  const Node& n = nodes_.at(id);
  if (n.len != 1) throw std::invalid_argument("Tape::scalar_value: node is not scalar");
  return arena_[n.val_off];
}

void Tape::check_finite(int id) const {
  const Node& n = nodes_[id];
  for (std::size_t i = 0; i < n.len; ++i)
    if (!std::isfinite(arena_[n.val_off + i]))
      throw std::runtime_error("Tape: non-finite forward value at node " + std::to_string(id));
}

int Tape::constant(std::span<const double> v) {
  Node n{};
  n.op = Op::kConstant;
  const int id = push(n, v.size());
  std::span<double> dst = mut_value(id);
  for (std::size_t i = 0; i < v.size(); ++i) dst[i] = v[i];
  check_finite(id);
  return id;
}

int Tape::param_view(std::size_t block_index) {
  if (params_ == nullptr) throw std::logic_error("Tape: no parameter vector bound");
  const ParamVector::Block& blk = params_->blocks.at(block_index);
  Node n{};
  n.op = Op::kParamView;
  n.rows = blk.rows;
  n.cols = blk.cols;
  n.param_off = blk.offset;
  const int id = push(n, blk.rows * blk.cols);
  std::span<double> dst = mut_value(id);
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = params_->values[blk.offset + i];
  check_finite(id);
  return id;
}

int Tape::matvec(int W, int x) {
  const Node& nw = nodes_.at(W);
  const Node& nx = nodes_.at(x);
  if (nw.rows == 0 || nw.cols != nx.len)
    throw std::invalid_argument("Tape::matvec: shape mismatch");
  Node n{};
  n.op = Op::kMatVec;
  n.a = W;
  n.b = x;
  const std::size_t rows = nw.rows, cols = nw.cols;
  const int id = push(n, rows);
  const double* w = arena_.data() + nodes_[W].val_off;
  const double* xv = arena_.data() + nodes_[x].val_off;
  double* y = arena_.data() + nodes_[id].val_off;
  for (std::size_t i = 0; i < rows; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) acc += w[i * cols + j] * xv[j];
    y[i] = acc;
  }
  check_finite(id);
  return id;
}

int Tape::affine(int W, int b, int x) {
  const int wx = matvec(W, x);
  return add(wx, b);
}

int Tape::tanh(int x) {
  Node n{};
  n.op = Op::kTanh;
  n.a = x;
  const std::size_t len = nodes_.at(x).len;
  const int id = push(n, len);
  const double* xv = arena_.data() + nodes_[x].val_off;
  double* y = arena_.data() + nodes_[id].val_off;
  for (std::size_t i = 0; i < len; ++i) y[i] = std::tanh(xv[i]);
  check_finite(id);
  return id;
}

int Tape::add(int x, int y) {
  const Node& nx = nodes_.at(x);
  const Node& ny = nodes_.at(y);
  if (nx.len != ny.len) throw std::invalid_argument("Tape::add: length mismatch");
  Node n{};
  n.op = Op::kAdd;
  n.a = x;
  n.b = y;
  const int id = push(n, nx.len);
  const double* xv = arena_.data() + nodes_[x].val_off;
  const double* yv = arena_.data() + nodes_[y].val_off;
  double* out = arena_.data() + nodes_[id].val_off;
  for (std::size_t i = 0; i < nodes_[id].len; ++i) out[i] = xv[i] + yv[i];
  check_finite(id);
  return id;
}

int Tape::sub(int x, int y) {
  const Node& nx = nodes_.at(x);
  const Node& ny = nodes_.at(y);
  if (nx.len != ny.len) throw std::invalid_argument("Tape::sub: length mismatch");
  Node n{};
  n.op = Op::kSub;
  n.a = x;
  n.b = y;
  const int id = push(n, nx.len);
  const double* xv = arena_.data() + nodes_[x].val_off;
  const double* yv = arena_.data() + nodes_[y].val_off;
  double* out = arena_.data() + nodes_[id].val_off;
  for (std::size_t i = 0; i < nodes_[id].len; ++i) out[i] = xv[i] - yv[i];
  check_finite(id);
  return id;
}

int Tape::concat(int x, int y) {
  const std::size_t lx = nodes_.at(x).len, ly = nodes_.at(y).len;
  Node n{};
  n.op = Op::kConcat;
  n.a = x;
  n.b = y;
  const int id = push(n, lx + ly);
  const double* xv = arena_.data() + nodes_[x].val_off;
  const double* yv = arena_.data() + nodes_[y].val_off;
  double* out = arena_.data() + nodes_[id].val_off;
  for (std::size_t i = 0; i < lx; ++i) out[i] = xv[i];
  for (std::size_t i = 0; i < ly; ++i) out[lx + i] = yv[i];
  check_finite(id);
  return id;
}

int Tape::sqnorm(int x) {
  Node n{};
  n.op = Op::kSqNorm;
  n.a = x;
  const int id = push(n, 1);
  const Node& nx = nodes_[x];
  const double* xv = arena_.data() + nx.val_off;
  double acc = 0.0;
  for (std::size_t i = 0; i < nx.len; ++i) acc += xv[i] * xv[i];
  arena_[nodes_[id].val_off] = acc;
  check_finite(id);
  return id;
}

int Tape::scale(int x, double c) {
  Node n{};
  n.op = Op::kScale;
  n.a = x;
  n.coeff = c;
  const std::size_t len = nodes_.at(x).len;
  const int id = push(n, len);
  const double* xv = arena_.data() + nodes_[x].val_off;
  double* out = arena_.data() + nodes_[id].val_off;
  for (std::size_t i = 0; i < len; ++i) out[i] = c * xv[i];
  check_finite(id);
  return id;
}

int Tape::sum(std::span<const int> scalars) {
  Node n{};
  n.op = Op::kSum;
  n.extra_off = sum_operands_.size();
  n.extra_len = scalars.size();
  for (int s : scalars) {
    if (nodes_.at(s).len != 1) throw std::invalid_argument("Tape::sum: operand is not scalar");
    sum_operands_.push_back(s);
  }
  const int id = push(n, 1);
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes_[id].extra_len; ++i)
    acc += arena_[nodes_[sum_operands_[nodes_[id].extra_off + i]].val_off];
  arena_[nodes_[id].val_off] = acc;
  check_finite(id);
  return id;
}

ParamVector Tape::backward(int root) {
  if (params_ == nullptr) throw std::logic_error("Tape: no parameter vector bound");
  const Node& rn = nodes_.at(root);
  if (rn.len != 1) throw std::invalid_argument("Tape::backward: root is not scalar");

  adjoint_.assign(arena_.size(), 0.0);
  pgrad_.assign(params_->size(), 0.0);
  adjoint_[rn.val_off] = 1.0;

  for (int id = root; id >= 0; --id) {
    const Node& n = nodes_[id];
    const double* adj = adjoint_.data() + n.val_off;
    bool touched = false;
    for (std::size_t i = 0; i < n.len; ++i) {
      if (adjoint_[n.val_off + i] != 0.0) {
        touched = true;
        break;
      }
    }
    if (!touched) continue;
    for (std::size_t i = 0; i < n.len; ++i)
      if (!std::isfinite(adj[i]))
        throw std::runtime_error("Tape::backward: non-finite adjoint at node " +
                                 std::to_string(id));
    switch (n.op) {
      case Op::kConstant:
        break;
      case Op::kParamView:
        for (std::size_t i = 0; i < n.len; ++i) pgrad_[n.param_off + i] += adj[i];
        break;
      case Op::kMatVec: {
        const Node& nw = nodes_[n.a];
        const Node& nx = nodes_[n.b];
        const double* w = arena_.data() + nw.val_off;
        const double* xv = arena_.data() + nx.val_off;
        double* wadj = adjoint_.data() + nw.val_off;
        double* xadj = adjoint_.data() + nx.val_off;
        for (std::size_t i = 0; i < nw.rows; ++i) {
          const double g = adj[i];
          if (g == 0.0) continue;
          for (std::size_t j = 0; j < nw.cols; ++j) {
            wadj[i * nw.cols + j] += g * xv[j];
            xadj[j] += g * w[i * nw.cols + j];
          }
        }
        break;
      }
      case Op::kAffine:
        break;  // expressed as matvec + add
      case Op::kTanh: {
        const Node& nx = nodes_[n.a];
        const double* y = arena_.data() + n.val_off;
        double* xadj = adjoint_.data() + nx.val_off;
        for (std::size_t i = 0; i < n.len; ++i) xadj[i] += adj[i] * (1.0 - y[i] * y[i]);
        break;
      }
      case Op::kAdd: {
        double* aadj = adjoint_.data() + nodes_[n.a].val_off;
        double* badj = adjoint_.data() + nodes_[n.b].val_off;
        for (std::size_t i = 0; i < n.len; ++i) {
          aadj[i] += adj[i];
          badj[i] += adj[i];
        }
        break;
      }
      case Op::kSub: {
        double* aadj = adjoint_.data() + nodes_[n.a].val_off;
        double* badj = adjoint_.data() + nodes_[n.b].val_off;
        for (std::size_t i = 0; i < n.len; ++i) {
          aadj[i] += adj[i];
          badj[i] -= adj[i];
        }
        break;
      }
      case Op::kConcat: {
        const Node& na = nodes_[n.a];
        const Node& nb = nodes_[n.b];
        double* aadj = adjoint_.data() + na.val_off;
        double* badj = adjoint_.data() + nb.val_off;
        for (std::size_t i = 0; i < na.len; ++i) aadj[i] += adj[i];
        for (std::size_t i = 0; i < nb.len; ++i) badj[i] += adj[na.len + i];
        break;
      }
      case Op::kSqNorm: {
        const Node& nx = nodes_[n.a];
        const double* xv = arena_.data() + nx.val_off;
        double* xadj = adjoint_.data() + nx.val_off;
        const double g = adj[0];
        for (std::size_t i = 0; i < nx.len; ++i) xadj[i] += 2.0 * g * xv[i];
        break;
      }
      case Op::kScale: {
        double* xadj = adjoint_.data() + nodes_[n.a].val_off;
        for (std::size_t i = 0; i < n.len; ++i) xadj[i] += n.coeff * adj[i];
        break;
      }
      case Op::kSum: {
        const double g = adj[0];
        for (std::size_t i = 0; i < n.extra_len; ++i) {
          const Node& ns = nodes_[sum_operands_[n.extra_off + i]];
          adjoint_[ns.val_off] += g;
        }
        break;
      }
    }
  }

  ParamVector grad;
  grad.blocks = params_->blocks;
  grad.values = pgrad_;
  return grad;
}

double grad_check(const std::function<int(Tape&)>& build, const ParamVector& p, double h) {
  if (h <= 0.0) throw std::invalid_argument("grad_check: h must be positive");
  Tape tape(&p);
  const int root = build(tape);
  if (!std::isfinite(tape.scalar_value(root)))
    throw std::runtime_error("grad_check: loss is not finite");
  const ParamVector analytic = tape.backward(root);

  ParamVector pert = p;
  Tape scratch;
  double worst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double saved = pert.values[i];
    pert.values[i] = saved + h;
    scratch.reset(&pert);
    const double up = scratch.scalar_value(build(scratch));
    pert.values[i] = saved - h;
    scratch.reset(&pert);
    const double dn = scratch.scalar_value(build(scratch));
    pert.values[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(dn))
      throw std::runtime_error("grad_check: loss is not finite at perturbed point");
    const double fd = (up - dn) / (2.0 * h);
    const double err = std::abs(analytic.values[i] - fd) / std::max(1.0, std::abs(fd));
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace coloke::ad
