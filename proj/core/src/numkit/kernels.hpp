// Copyright 2026 The unitforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Raw loops shared by the plain tensor functions and the graph ops.

#include <cmath>
#include <span>

#include "unitforge/numkit/tensor.hpp"

namespace unitforge::nk::kernels {

// C(MxN) (+)= A(MxK) * B(KxN)
inline void gemm_nn(std::size_t m, std::size_t k, std::size_t n, const double* a,
                    const double* b, double* c, bool accumulate) {
  if (!accumulate) std::fill(c, c + m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a[i * k + p];
      if (av == 0.0) continue;
      const double* bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

// C(MxN) (+)= A(MxK) * B(NxK)^T
inline void gemm_nt(std::size_t m, std::size_t k, std::size_t n, const double* a,
                    const double* b, double* c, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* ai = a + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* bj = b + j * k;
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += ai[p] * bj[p];
      c[i * n + j] = accumulate ? c[i * n + j] + s : s;
    }
  }
}

// C(MxN) (+)= A(KxM)^T * B(KxN)
inline void gemm_tn(std::size_t m, std::size_t k, std::size_t n, const double* a,
                    const double* b, double* c, bool accumulate) {
  if (!accumulate) std::fill(c, c + m * n, 0.0);
  for (std::size_t p = 0; p < k; ++p) {
    const double* ap = a + p * m;
    const double* bp = b + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double av = ap[i];
      if (av == 0.0) continue;
      double* ci = c + i * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += av * bp[j];
    }
  }
}

// out[t, o] = sum_{j, d} x[t*s + j, d] * w[j, d, o]
inline void conv1d_forward(const Tensor& x, const Tensor& w, std::size_t stride, Tensor& out) {
  const std::size_t k = w.dim(0), din = w.dim(1), dout = w.dim(2);
  const std::size_t tout = out.rows();
  const double* xp = x.data().data();
  const double* wp = w.data().data();
  double* op = out.data().data();
  std::fill(op, op + tout * dout, 0.0);
  for (std::size_t t = 0; t < tout; ++t) {
    double* orow = op + t * dout;
    for (std::size_t j = 0; j < k; ++j) {
      const double* xrow = xp + (t * stride + j) * din;
      const double* wj = wp + j * din * dout;
      for (std::size_t d = 0; d < din; ++d) {
        const double xv = xrow[d];
        if (xv == 0.0) continue;
        const double* wjd = wj + d * dout;
        for (std::size_t o = 0; o < dout; ++o) orow[o] += xv * wjd[o];
      }
    }
  }
}

// dx[t*s + j, d] += sum_o g[t, o] * w[j, d, o]
inline void conv1d_backward_input(const Tensor& g, const Tensor& w, std::size_t stride, Tensor& dx) {
  const std::size_t k = w.dim(0), din = w.dim(1), dout = w.dim(2);
  const std::size_t tout = g.rows();
  const double* gp = g.data().data();
  const double* wp = w.data().data();
  double* dxp = dx.data().data();
  for (std::size_t t = 0; t < tout; ++t) {
    const double* grow = gp + t * dout;
    for (std::size_t j = 0; j < k; ++j) {
      double* dxrow = dxp + (t * stride + j) * din;
      const double* wj = wp + j * din * dout;
      for (std::size_t d = 0; d < din; ++d) {
        const double* wjd = wj + d * dout;
        double s = 0.0;
        for (std::size_t o = 0; o < dout; ++o) s += grow[o] * wjd[o];
        dxrow[d] += s;
      }
    }
  }
}

// dw[j, d, o] += sum_t x[t*s + j, d] * g[t, o]
inline void conv1d_backward_kernel(const Tensor& x, const Tensor& g, std::size_t stride, Tensor& dw) {
  const std::size_t k = dw.dim(0), din = dw.dim(1), dout = dw.dim(2);
  const std::size_t tout = g.rows();
  const double* xp = x.data().data();
  const double* gp = g.data().data();
  double* dwp = dw.data().data();
  for (std::size_t t = 0; t < tout; ++t) {
    const double* grow = gp + t * dout;
    for (std::size_t j = 0; j < k; ++j) {
      const double* xrow = xp + (t * stride + j) * din;
      double* dwj = dwp + j * din * dout;
      for (std::size_t d = 0; d < din; ++d) {
        const double xv = xrow[d];
        if (xv == 0.0) continue;
        double* dwjd = dwj + d * dout;
        for (std::size_t o = 0; o < dout; ++o) dwjd[o] += xv * grow[o];
      }
    }
  }
}

inline void softmax_inplace(std::span<double> v, double temperature) {
  double mx = -INFINITY;
  for (double x : v) mx = std::max(mx, x);
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp((x - mx) / temperature);
    sum += x;
  }
  for (double& x : v) x /= sum;
}

}  // namespace unitforge::nk::kernels
