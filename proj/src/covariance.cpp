#include "gsimg/covariance.hpp"

#include <cmath>

namespace gsimg {

std::string_view to_string(CovarianceVariant variant) noexcept {
  switch (variant) {
    case CovarianceVariant::Direct:
      return "direct";
    case CovarianceVariant::Cholesky:
      return "cholesky";
    case CovarianceVariant::RotScale:
      return "rs";
  }
  return "unknown";
}

std::optional<CovarianceVariant> parse_variant(std::string_view name) noexcept {
  if (name == "direct") return CovarianceVariant::Direct;
  if (name == "cholesky") return CovarianceVariant::Cholesky;
  if (name == "rs" || name == "rotscale") return CovarianceVariant::RotScale;
  return std::nullopt;
}

Sym2 materialize_covariance(CovarianceVariant variant, const CovParams& p) noexcept {
  switch (variant) {
    case CovarianceVariant::Direct:
      return {p[0], p[1], p[2]};
    case CovarianceVariant::Cholesky: {
      const double l11 = p[0], l21 = p[1], l22 = p[2];
      return {l11 * l11, l11 * l21, l21 * l21 + l22 * l22};
    }
    case CovarianceVariant::RotScale: {
      const double c = std::cos(p[0]), s = std::sin(p[0]);
      const double a = p[1] * p[1], b = p[2] * p[2];
      return {c * c * a + s * s * b, c * s * (a - b), s * s * a + c * c * b};
    }
  }
  return {};
}

bool is_psd(const Sym2& m) noexcept { return m.det() >= 0.0 && m.xx >= 0.0 && m.yy >= 0.0; }

CovParams covariance_param_gradient(CovarianceVariant variant, const CovParams& p,
                                    const SymGrad& g) noexcept {
  switch (variant) {
    case CovarianceVariant::Direct:
      return g;
    case CovarianceVariant::Cholesky: {
      // xx = l11^2, xy = l11 l21, yy = l21^2 + l22^2
      const double l11 = p[0], l21 = p[1], l22 = p[2];
      return {2.0 * l11 * g[0] + l21 * g[1], l11 * g[1] + 2.0 * l21 * g[2], 2.0 * l22 * g[2]};
    }
    case CovarianceVariant::RotScale: {
      const double c = std::cos(p[0]), s = std::sin(p[0]);
      const double a = p[1] * p[1], b = p[2] * p[2];
      const double d_theta =
          (-2.0 * c * s * g[0] + (c * c - s * s) * g[1] + 2.0 * c * s * g[2]) * (a - b);
      const double d_a = c * c * g[0] + c * s * g[1] + s * s * g[2];
      const double d_b = s * s * g[0] - c * s * g[1] + c * c * g[2];
      return {d_theta, 2.0 * p[1] * d_a, 2.0 * p[2] * d_b};
    }
  }
  return {};
}

std::optional<CovParams> cholesky_factor(const Sym2& m) noexcept {
  if (!(m.xx > 0.0)) return std::nullopt;
  const double l11 = std::sqrt(m.xx);
  const double l21 = m.xy / l11;
  const double rem = m.yy - l21 * l21;
  if (!(rem > 0.0)) return std::nullopt;
  return CovParams{l11, l21, std::sqrt(rem)};
}

}  // namespace gsimg
