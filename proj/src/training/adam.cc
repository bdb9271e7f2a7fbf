#include "reblur/training/adam.h"

#include <cmath>
#include <stdexcept>

namespace reblur {

AdamState InitAdam(const Network& net) {
  AdamState state;
  for (const NamedParameter& p : net.parameters()) {
    state.first_moment.emplace_back(p.var.value().shape());
    state.second_moment.emplace_back(p.var.value().shape());
  }
  return state;
}

void AdamStep(Network& net, AdamState& state, double lr, const AdamParams& params) {
  auto& ps = net.parameters();
  if (state.first_moment.size() != ps.size() || state.second_moment.size() != ps.size()) {
    throw std::logic_error("AdamStep: optimizer state does not match network");
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(params.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(params.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const Tensor g = ps[i].var.grad();
    Tensor& theta = ps[i].var.mutable_value();
    Tensor& m = state.first_moment[i];
    Tensor& v = state.second_moment[i];
    for (std::size_t j = 0; j < theta.size(); ++j) {
      m[j] = params.beta1 * m[j] + (1.0 - params.beta1) * g[j];
      v[j] = params.beta2 * v[j] + (1.0 - params.beta2) * g[j] * g[j];
      const double m_hat = m[j] / c1;
      const double v_hat = v[j] / c2;
      theta[j] -= lr * m_hat / (std::sqrt(v_hat) + params.epsilon);
    }
  }
}

void GradientDescentStep(Network& net, double lr) {
  for (NamedParameter& p : net.parameters()) {
    if (!p.var.has_grad()) continue;
    const Tensor g = p.var.grad();
    Tensor& theta = p.var.mutable_value();
    for (std::size_t j = 0; j < theta.size(); ++j) theta[j] -= lr * g[j];
  }
}

}  // namespace reblur
