#include "reblur/models/autograd.h"

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>

#include "reblur/data/image.h"

namespace reblur {

struct Var::Node {
  Tensor value;
  Tensor grad;  // empty until something accumulates into it
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;

  Tensor& GradBuffer() {
    if (grad.empty()) grad = Tensor(value.shape());
    return grad;
  }
};

struct VarAccess {
  using Node = Var::Node;
  static const std::shared_ptr<Node>& node(const Var& v) {
    if (!v.node_) throw std::logic_error("use of undefined Var");
    return v.node_;
  }
  static Var Make(std::shared_ptr<Node> n) { return Var(std::move(n)); }
};

namespace {

using Node = VarAccess::Node;
using NodePtr = std::shared_ptr<Node>;

// Result node for an op; the tape is recorded only if an input needs it.
Var MakeResult(Tensor value, std::vector<NodePtr> inputs,
               std::function<void(Node&)> backward) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  for (const NodePtr& in : inputs) node->requires_grad |= in->requires_grad;
  if (node->requires_grad) {
    node->inputs = std::move(inputs);
    node->backward = std::move(backward);
  }
  return VarAccess::Make(std::move(node));
}

void RequireSameShape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                a.ShapeString() + " vs " + b.ShapeString());
  }
}

// Source offsets for one spatial axis: table[k * out + o] is the input
// coordinate read by output o at kernel tap k.
std::vector<int> ReflectTable(int in, int out, int k, int stride) {
  const int pad = k / 2;
  std::vector<int> table(static_cast<std::size_t>(k) * out);
  for (int t = 0; t < k; ++t) {
    for (int o = 0; o < out; ++o) {
      table[t * out + o] = ReflectIndex(o * stride + t - pad, in);
    }
  }
  return table;
}

struct ConvGeometry {
  int n, cin, h, w, cout, k, stride, ho, wo;
  std::vector<int> rows, cols;
  int patch() const { return cin * k * k; }
  int plane_out() const { return ho * wo; }
};

// Output columns [lo, hi) of tap kx read input columns lo + kx - pad onward
// without reflection; only meaningful for stride 1.
std::pair<int, int> DirectSpan(const ConvGeometry& g, int kx) {
  if (g.stride != 1) return {0, 0};
  const int pad = g.k / 2;
  const int lo = std::max(0, pad - kx);
  const int hi = std::min(g.wo, g.w + pad - kx);
  return lo < hi ? std::pair{lo, hi} : std::pair{0, 0};
}

void Im2Col(const ConvGeometry& g, const double* x, double* col) {
  const int p = g.plane_out();
  for (int ci = 0; ci < g.cin; ++ci) {
    const double* xc = x + static_cast<std::size_t>(ci) * g.h * g.w;
    for (int ky = 0; ky < g.k; ++ky) {
      for (int kx = 0; kx < g.k; ++kx) {
        double* dst = col + static_cast<std::size_t>((ci * g.k + ky) * g.k + kx) * p;
        const int* ry = &g.rows[ky * g.ho];
        const int* rx = &g.cols[kx * g.wo];
        const auto [lo, hi] = DirectSpan(g, kx);
        const int shift = kx - g.k / 2;
        for (int oy = 0; oy < g.ho; ++oy) {
          const double* src = xc + static_cast<std::size_t>(ry[oy]) * g.w;
          double* d = dst + static_cast<std::size_t>(oy) * g.wo;
          for (int ox = 0; ox < lo; ++ox) d[ox] = src[rx[ox]];
          std::copy(src + lo + shift, src + hi + shift, d + lo);
          for (int ox = std::max(lo, hi); ox < g.wo; ++ox) d[ox] = src[rx[ox]];
        }
      }
    }
  }
}

void Col2ImAdd(const ConvGeometry& g, const double* col, double* dx) {
  const int p = g.plane_out();
  for (int ci = 0; ci < g.cin; ++ci) {
    double* xc = dx + static_cast<std::size_t>(ci) * g.h * g.w;
    for (int ky = 0; ky < g.k; ++ky) {
      for (int kx = 0; kx < g.k; ++kx) {
        const double* src =
            col + static_cast<std::size_t>((ci * g.k + ky) * g.k + kx) * p;
        const int* ry = &g.rows[ky * g.ho];
        const int* rx = &g.cols[kx * g.wo];
        const auto [lo, hi] = DirectSpan(g, kx);
        const int shift = kx - g.k / 2;
        for (int oy = 0; oy < g.ho; ++oy) {
          double* dst = xc + static_cast<std::size_t>(ry[oy]) * g.w;
          const double* s = src + static_cast<std::size_t>(oy) * g.wo;
          for (int ox = 0; ox < lo; ++ox) dst[rx[ox]] += s[ox];
          for (int ox = lo; ox < hi; ++ox) dst[ox + shift] += s[ox];
          for (int ox = std::max(lo, hi); ox < g.wo; ++ox) dst[rx[ox]] += s[ox];
        }
      }
    }
  }
}

std::unique_ptr<double[]> Scratch(std::size_t n) {
  return std::make_unique_for_overwrite<double[]>(n);
}

}  // namespace

// --- Var ---------------------------------------------------------------------

Var Var::Leaf(Tensor value, bool requires_grad) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = requires_grad;
  return Var(std::move(node));
}

const Tensor& Var::value() const { return VarAccess::node(*this)->value; }
Tensor& Var::mutable_value() { return VarAccess::node(*this)->value; }
bool Var::requires_grad() const { return VarAccess::node(*this)->requires_grad; }
void Var::set_requires_grad(bool on) { VarAccess::node(*this)->requires_grad = on; }
bool Var::has_grad() const { return !VarAccess::node(*this)->grad.empty(); }

Tensor Var::grad() const {
  const NodePtr& n = VarAccess::node(*this);
  return n->grad.empty() ? Tensor(n->value.shape()) : n->grad;
}

void Var::ZeroGrad() { VarAccess::node(*this)->grad = Tensor(); }

Var Parameter(Tensor value) { return Var::Leaf(std::move(value), true); }
Var Constant(Tensor value) { return Var::Leaf(std::move(value), false); }
Var Detach(const Var& x) { return Constant(x.value()); }

// --- ops ---------------------------------------------------------------------

Var Conv2d(const Var& x, const Var& weight, const Var& bias, int stride) {
  const Tensor& xv = x.value();
  const Tensor& wv = weight.value();
  const Tensor& bv = bias.value();
  if (stride < 1) throw std::invalid_argument("Conv2d: stride < 1");
  if (wv.h() != wv.w() || wv.h() % 2 == 0) {
    throw std::invalid_argument("Conv2d: kernel must be square and odd");
  }
  if (wv.c() != xv.c()) {
    throw std::invalid_argument("Conv2d: input has " + std::to_string(xv.c()) +
                                " channels, weight expects " +
                                std::to_string(wv.c()));
  }
  if (bv.size() != static_cast<std::size_t>(wv.n())) {
    throw std::invalid_argument("Conv2d: bias size mismatch");
  }
  auto geo = std::make_shared<ConvGeometry>();
  ConvGeometry& g = *geo;
  g.n = xv.n();
  g.cin = xv.c();
  g.h = xv.h();
  g.w = xv.w();
  g.cout = wv.n();
  g.k = wv.h();
  g.stride = stride;
  g.ho = (g.h - 1) / stride + 1;
  g.wo = (g.w - 1) / stride + 1;
  g.rows = ReflectTable(g.h, g.ho, g.k, stride);
  g.cols = ReflectTable(g.w, g.wo, g.k, stride);

  Tensor out({g.n, g.cout, g.ho, g.wo});
  const int kdim = g.patch();
  const int p = g.plane_out();
  const auto col = Scratch(static_cast<std::size_t>(kdim) * p);
  for (int s = 0; s < g.n; ++s) {
    Im2Col(g, xv.data() + static_cast<std::size_t>(s) * g.cin * g.h * g.w, col.get());
    double* o = out.data() + static_cast<std::size_t>(s) * g.cout * p;
    for (int co = 0; co < g.cout; ++co) {
      std::fill(o + static_cast<std::size_t>(co) * p,
                o + static_cast<std::size_t>(co + 1) * p, bv[co]);
    }
    cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, g.cout, p, kdim, 1.0,
                wv.data(), kdim, col.get(), p, 1.0, o, p);
  }

  auto xn = VarAccess::node(x);
  auto wn = VarAccess::node(weight);
  auto bn = VarAccess::node(bias);
  return MakeResult(std::move(out), {xn, wn, bn}, [geo, xn, wn, bn](Node& self) {
    const ConvGeometry& g = *geo;
    const int kdim = g.patch();
    const int p = g.plane_out();
    const Tensor& gout = self.grad;
    const auto col = Scratch(static_cast<std::size_t>(kdim) * p);
    for (int s = 0; s < g.n; ++s) {
      const double* go = gout.data() + static_cast<std::size_t>(s) * g.cout * p;
      if (wn->requires_grad) {
        Im2Col(g, xn->value.data() + static_cast<std::size_t>(s) * g.cin * g.h * g.w,
               col.get());
        cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, g.cout, kdim, p, 1.0,
                    go, p, col.get(), p, 1.0, wn->GradBuffer().data(), kdim);
      }
      if (bn->requires_grad) {
        double* gb = bn->GradBuffer().data();
        for (int co = 0; co < g.cout; ++co) {
          double acc = 0.0;
          const double* row = go + static_cast<std::size_t>(co) * p;
          for (int i = 0; i < p; ++i) acc += row[i];
          gb[co] += acc;
        }
      }
      if (xn->requires_grad) {
        cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans, kdim, p, g.cout, 1.0,
                    wn->value.data(), kdim, go, p, 0.0, col.get(), p);
        Col2ImAdd(g, col.get(),
                  xn->GradBuffer().data() +
                      static_cast<std::size_t>(s) * g.cin * g.h * g.w);
      }
    }
  });
}

Var Relu(const Var& x) {
  Tensor out = x.value();
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  auto xn = VarAccess::node(x);
  return MakeResult(std::move(out), {xn}, [xn](Node& self) {
    double* gx = xn->GradBuffer().data();
    const double* xv = xn->value.data();
    const double* go = self.grad.data();
    for (std::size_t i = 0; i < self.grad.size(); ++i) {
      if (xv[i] > 0.0) gx[i] += go[i];
    }
  });
}

Var Add(const Var& a, const Var& b) {
  RequireSameShape(a.value(), b.value(), "Add");
  Tensor out = a.value();
  const double* bv = b.value().data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  auto an = VarAccess::node(a);
  auto bn = VarAccess::node(b);
  return MakeResult(std::move(out), {an, bn}, [an, bn](Node& self) {
    for (const NodePtr& in : {an, bn}) {
      if (!in->requires_grad) continue;
      double* g = in->GradBuffer().data();
      for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Var Scale(const Var& x, double factor) {
  Tensor out = x.value();
  for (double& v : out.values()) v *= factor;
  auto xn = VarAccess::node(x);
  return MakeResult(std::move(out), {xn}, [xn, factor](Node& self) {
    double* g = xn->GradBuffer().data();
    for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += factor * self.grad[i];
  });
}

Var Upsample2x(const Var& x) {
  const Tensor& xv = x.value();
  const int n = xv.n(), c = xv.c(), h = xv.h(), w = xv.w();
  Tensor out({n, c, 2 * h, 2 * w});
  for (int s = 0; s < n; ++s) {
    for (int ch = 0; ch < c; ++ch) {
      for (int y = 0; y < 2 * h; ++y) {
        for (int xx = 0; xx < 2 * w; ++xx) {
          out.at(s, ch, y, xx) = xv.at(s, ch, y / 2, xx / 2);
        }
      }
    }
  }
  auto xn = VarAccess::node(x);
  return MakeResult(std::move(out), {xn}, [xn](Node& self) {
    Tensor& gx = xn->GradBuffer();
    const Tensor& go = self.grad;
    for (int s = 0; s < go.n(); ++s) {
      for (int ch = 0; ch < go.c(); ++ch) {
        for (int y = 0; y < go.h(); ++y) {
          for (int xx = 0; xx < go.w(); ++xx) {
            gx.at(s, ch, y / 2, xx / 2) += go.at(s, ch, y, xx);
          }
        }
      }
    }
  });
}

Var MeanAbsDiff(const Var& a, const Var& b) {
  RequireSameShape(a.value(), b.value(), "MeanAbsDiff");
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  double acc = 0.0;
  for (std::size_t i = 0; i < av.size(); ++i) acc += std::abs(av[i] - bv[i]);
  const double inv_n = 1.0 / static_cast<double>(av.size());
  auto an = VarAccess::node(a);
  auto bn = VarAccess::node(b);
  return MakeResult(Tensor::Scalar(acc * inv_n), {an, bn},
                    [an, bn, inv_n](Node& self) {
                      const double g = self.grad.item() * inv_n;
                      const Tensor& av = an->value;
                      const Tensor& bv = bn->value;
                      double* ga = an->requires_grad ? an->GradBuffer().data() : nullptr;
                      double* gb = bn->requires_grad ? bn->GradBuffer().data() : nullptr;
                      for (std::size_t i = 0; i < av.size(); ++i) {
                        const double d = av[i] - bv[i];
                        const double s = d > 0.0 ? g : (d < 0.0 ? -g : 0.0);
                        if (ga) ga[i] += s;
                        if (gb) gb[i] -= s;
                      }
                    });
}

void Backward(const Var& root) {
  const NodePtr& start = VarAccess::node(root);
  if (start->value.size() != 1) {
    throw std::invalid_argument("Backward: root must be a scalar, got " +
                                start->value.ShapeString());
  }
  if (!start->requires_grad) return;

  // Iterative post-order DFS gives a topological order of the tape.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack{{start.get(), 0}};
  visited.insert(start.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* child = node->inputs[next++].get();
      if (child->requires_grad && visited.insert(child).second) {
        stack.emplace_back(child, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  start->GradBuffer()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->backward && !node->grad.empty()) node->backward(*node);
  }
  // Interior gradients are not needed after the sweep.
  for (Node* node : order) {
    if (node->backward) node->grad = Tensor();
  }
}

}  // namespace reblur
