#include "gsimg/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace gsimg {

void AdamMoments::resize(std::size_t primitives) {
  m_.resize(primitives * stride_, 0.0);
  v_.resize(primitives * stride_, 0.0);
}

void AdamMoments::retain(std::span<const std::size_t> kept) {
  std::size_t out = 0;
  for (std::size_t idx : kept) {
    if (idx >= primitives()) throw std::out_of_range("AdamMoments::retain index");
    for (std::size_t j = 0; j < stride_; ++j) {
      m_[out * stride_ + j] = m_[idx * stride_ + j];
      v_[out * stride_ + j] = v_[idx * stride_ + j];
    }
    ++out;
  }
  resize(out);
}

void AdamMoments::update(std::span<double> params, std::span<const double> grads, double lr,
                         long step, const AdamHyper& hyper) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw std::invalid_argument("Adam: parameter/moment size mismatch");
  }
  const double bc1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(step));
  const double step_size = lr / bc1;
  const double inv_sqrt_bc2 = 1.0 / std::sqrt(bc2);
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = hyper.beta1 * m_[i] + (1.0 - hyper.beta1) * grads[i];
    v_[i] = hyper.beta2 * v_[i] + (1.0 - hyper.beta2) * grads[i] * grads[i];
    params[i] -= step_size * m_[i] / (std::sqrt(v_[i]) * inv_sqrt_bc2 + hyper.eps);
  }
}

}  // namespace gsimg
