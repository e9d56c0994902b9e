#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace gsimg {

/// How the three free covariance parameters of a primitive are interpreted.
///   Direct:   (sxx, sxy, syy), the matrix entries themselves.
///   Cholesky: (l11, l21, l22), Sigma = L L^T with L lower triangular.
///   RotScale: (theta, s1, s2), Sigma = R(theta) diag(s1, s2)^2 R(theta)^T.
enum class CovarianceVariant : std::uint8_t { Direct = 0, Cholesky = 1, RotScale = 2 };

std::string_view to_string(CovarianceVariant variant) noexcept;
/// Accepts "direct", "cholesky", "rs" / "rotscale".
std::optional<CovarianceVariant> parse_variant(std::string_view name) noexcept;

using CovParams = std::array<double, 3>;

/// Symmetric 2x2 matrix [[xx, xy], [xy, yy]]; x is the column axis, y the row axis.
struct Sym2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  double det() const noexcept { return xx * yy - xy * xy; }
  Sym2 plus_isotropic(double s) const noexcept { return {xx + s, xy, yy + s}; }
  /// Caller guarantees det() != 0.
  Sym2 inverse() const noexcept {
    const double inv_det = 1.0 / det();
    return {yy * inv_det, -xy * inv_det, xx * inv_det};
  }
  friend bool operator==(const Sym2&, const Sym2&) = default;
};

struct CovarianceParam {
  CovarianceVariant variant = CovarianceVariant::Direct;
  CovParams values{};

  static CovarianceParam direct(double sxx, double sxy, double syy) {
    return {CovarianceVariant::Direct, {sxx, sxy, syy}};
  }
  static CovarianceParam cholesky(double l11, double l21, double l22) {
    return {CovarianceVariant::Cholesky, {l11, l21, l22}};
  }
  static CovarianceParam rot_scale(double theta, double s1, double s2) {
    return {CovarianceVariant::RotScale, {theta, s1, s2}};
  }
};

Sym2 materialize_covariance(CovarianceVariant variant, const CovParams& p) noexcept;
inline Sym2 materialize_covariance(const CovarianceParam& p) noexcept {
  return materialize_covariance(p.variant, p.values);
}

/// det >= 0 and both diagonal entries >= 0.
bool is_psd(const Sym2& m) noexcept;

/// is_psd with a strictly positive determinant: the condition under which a
/// footprint is rendered at all.
inline bool is_renderable(const Sym2& m) noexcept { return is_psd(m) && m.det() > 0.0; }

/// Gradient with respect to the symmetric matrix, in the (d_xx, d_xy, d_yy)
/// convention where d_xy is the derivative w.r.t. the single shared
/// off-diagonal value (so it already carries the factor 2).
using SymGrad = std::array<double, 3>;

/// Pulls a SymGrad back onto the variant's own parameters.
CovParams covariance_param_gradient(CovarianceVariant variant, const CovParams& p,
                                    const SymGrad& grad) noexcept;

/// Lower Cholesky factor (l11, l21, l22) of a positive definite matrix.
std::optional<CovParams> cholesky_factor(const Sym2& m) noexcept;

}  // namespace gsimg
