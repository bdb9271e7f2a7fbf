#ifndef REBLUR_MODELS_AUTOGRAD_H_
#define REBLUR_MODELS_AUTOGRAD_H_

#include <functional>
#include <memory>
#include <vector>

#include "reblur/models/tensor.h"

namespace reblur {

// Reverse-mode differentiation over whole tensors. A Var is a cheap handle
// to a node of the expression graph; copying a Var aliases the node.
//
// Nodes record their inputs and a backward closure only when at least one
// input requires a gradient, so evaluating with frozen or detached operands
// builds no tape at all.
class Var {
 public:
  Var() = default;

  // Leaf holding `value`. Leaves with requires_grad accumulate gradients.
  static Var Leaf(Tensor value, bool requires_grad);

  bool defined() const { return node_ != nullptr; }
  const Tensor& value() const;
  Tensor& mutable_value();
  const Tensor::Shape& shape() const { return value().shape(); }

  bool requires_grad() const;
  void set_requires_grad(bool on);

  // Accumulated gradient; zeros of the value's shape if nothing has been
  // accumulated since the last ZeroGrad.
  Tensor grad() const;
  bool has_grad() const;
  void ZeroGrad();

 private:
  struct Node;
  friend struct VarAccess;
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  std::shared_ptr<Node> node_;
};

Var Parameter(Tensor value);
Var Constant(Tensor value);

// Same value, cut from the graph: no gradient flows through the result.
Var Detach(const Var& x);

// 2-D convolution with reflect "same" padding of kernel_size/2 on each side.
// x: (N,Cin,H,W); weight: (Cout,Cin,k,k); bias: (Cout,1,1,1).
// Output spatial size is ceil(H/stride) x ceil(W/stride) for odd k.
Var Conv2d(const Var& x, const Var& weight, const Var& bias, int stride = 1);

Var Relu(const Var& x);
Var Add(const Var& a, const Var& b);
Var Scale(const Var& x, double factor);

// Nearest-neighbour 2x upsampling.
Var Upsample2x(const Var& x);

// mean(|a - b|) over all elements, as a scalar. d|x|/dx at 0 is taken as 0.
Var MeanAbsDiff(const Var& a, const Var& b);

// Back-propagates d(root)/d(.) into every reachable leaf that requires a
// gradient. `root` must be a scalar.
void Backward(const Var& root);

}  // namespace reblur

#endif  // REBLUR_MODELS_AUTOGRAD_H_
