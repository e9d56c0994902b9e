#pragma once

#include <array>
#include <span>

#include "gsimg/gaussian_cloud.hpp"

namespace gsimg {

static_assert(sizeof(Vec2) == 2 * sizeof(double));
static_assert(sizeof(CovParams) == 3 * sizeof(double));
static_assert(sizeof(Rgb) == 3 * sizeof(double));

// Flat view over an array of fixed-size double aggregates.
template <typename T>
std::span<double> scalar_view(std::span<T> s) {
  return {reinterpret_cast<double*>(s.data()), s.size() * (sizeof(T) / sizeof(double))};
}

template <typename T>
std::span<const double> scalar_view(std::span<const T> s) {
  return {reinterpret_cast<const double*>(s.data()), s.size() * (sizeof(T) / sizeof(double))};
}

}  // namespace gsimg
