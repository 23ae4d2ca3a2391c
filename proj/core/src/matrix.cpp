// Copyright 2026 The hardneg-lab Authors
// SPDX-License-Identifier: Apache-2.0

#include "hardneg/matrix.hpp"

#include <algorithm>
#include <string>

#include "hardneg/error.hpp"

namespace hardneg {

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Matrix affine(const Matrix& x, const Matrix& w, std::span<const double> bias) {
  if (x.cols() != w.cols() || bias.size() != w.rows()) {
    throw Error(ErrorKind::DimensionMismatch,
                "affine: input has " + std::to_string(x.cols()) + " columns, weight is " +
                    std::to_string(w.rows()) + "x" + std::to_string(w.cols()));
  }
  // y = x·wᵀ + b computed as rows of axpy updates over wᵀ.
  const std::size_t in = w.cols();
  const std::size_t out_dim = w.rows();
  std::vector<double> wt(in * out_dim);
  for (std::size_t o = 0; o < out_dim; ++o)
    for (std::size_t i = 0; i < in; ++i) wt[i * out_dim + o] = w(o, i);

  Matrix out(x.rows(), out_dim);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const double* __restrict xr = x.row(r).data();
    double* __restrict yr = out.row(r).data();
    for (std::size_t o = 0; o < out_dim; ++o) yr[o] = bias[o];
    for (std::size_t i = 0; i < in; ++i) {
      const double xi = xr[i];
      const double* __restrict wi = wt.data() + i * out_dim;
      for (std::size_t o = 0; o < out_dim; ++o) yr[o] += xi * wi[o];
    }
  }
  return out;
}

Matrix affine_backward(const Matrix& x, const Matrix& w, const Matrix& dy, Matrix& dw,
                       std::span<double> db) {
  Matrix dx(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const auto xr = x.row(r);
    const auto dyr = dy.row(r);
    auto dxr = dx.row(r);
    for (std::size_t o = 0; o < w.rows(); ++o) {
      const double g = dyr[o];
      if (g == 0.0) continue;
      db[o] += g;
      double* __restrict dwr = dw.row(o).data();
      const double* __restrict wr = w.row(o).data();
      const double* __restrict xp = xr.data();
      double* __restrict dxp = dxr.data();
      const std::size_t n = xr.size();
      for (std::size_t i = 0; i < n; ++i) dwr[i] += g * xp[i];
      for (std::size_t i = 0; i < n; ++i) dxp[i] += g * wr[i];
    }
  }
  return dx;
}

}  // namespace hardneg
