#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace coloke::ad {

// Flat trainable-parameter vector with a block layout (weight matrices,
// bias vectors, the Koopman matrix). Blocks partition the value array.
struct ParamVector {
  struct Block {
    std::size_t offset = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;  // 1 for vectors
  };
  std::vector<double> values;
  std::vector<Block> blocks;

  std::size_t size() const { return values.size(); }
  // Appends a zero-initialized block and returns its index in `blocks`.
  std::size_t add_block(std::size_t rows, std::size_t cols);
  bool layout_consistent() const;  // blocks tile [0, size) exactly once
};

// Reverse-mode tape. Nodes hold vector values in a shared arena; parameters
// enter the graph through views into a ParamVector bound at reset time.
// Forward values are checked finite at node creation.
class Tape {
 public:
  Tape() = default;
  explicit Tape(const ParamVector* params) { reset(params); }

  void reset(const ParamVector* params);
  const ParamVector* params() const { return params_; }

  int constant(std::span<const double> v);
  int param_view(std::size_t block_index);          // whole block as matrix/vector
  int matvec(int W, int x);                          // W * x
  int affine(int W, int b, int x);                   // W * x + b
  int tanh(int x);                                   // elementwise
  int add(int x, int y);
  int sub(int x, int y);
  int concat(int x, int y);
  int sqnorm(int x);                                 // ||x||^2, scalar
  int scale(int x, double c);                        // c * x
  int sum(std::span<const int> scalars);             // scalar sum

  std::size_t node_count() const { return nodes_.size(); }
  std::span<const double> value(int id) const;
  double scalar_value(int id) const;

  // Gradient of the scalar root with respect to every parameter coordinate.
  // Parameters not reached by the graph get zero. Throws if the root is not
  // scalar or a non-finite adjoint appears (message carries the node id).
  ParamVector backward(int root);

 private:
  enum class Op : std::uint8_t {
    kConstant,
    kParamView,
    kMatVec,
    kAffine,
    kTanh,
    kAdd,
    kSub,
    kConcat,
    kSqNorm,
    kScale,
    kSum,
  };
  struct Node {
    Op op;
    int a = -1, b = -1, c = -1;
    std::size_t val_off = 0;
    std::size_t len = 0;
    std::size_t rows = 0, cols = 0;     // shape for matrix-valued nodes
    std::size_t param_off = 0;          // for kParamView
    double coeff = 0.0;                 // for kScale
    std::size_t extra_off = 0, extra_len = 0;  // operand list for kSum
  };

  int push(Node n, std::size_t len);
  void check_finite(int id) const;
  std::span<double> mut_value(int id);

  const ParamVector* params_ = nullptr;
  std::vector<Node> nodes_;
  std::vector<double> arena_;
  std::vector<int> sum_operands_;
  std::vector<double> adjoint_;
  std::vector<double> pgrad_;
};

// Max over coordinates of |analytic - central difference| / max(1, |central
// difference|) for a scalar loss built by `build` on a tape bound to p.
double grad_check(const std::function<int(Tape&)>& build, const ParamVector& p, double h);

}  // namespace coloke::ad
