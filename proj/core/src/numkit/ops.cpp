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

#include "unitforge/numkit/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "numkit/kernels.hpp"
#include "unitforge/error.hpp"

namespace unitforge::nk {
namespace {

Node& input(Node& n, std::size_t i) { return *n.inputs[i]; }
bool wants(Node& n, std::size_t i) { return n.inputs[i]->requires_grad; }

void require_matrix(const Tensor& t, const char* op) {
  if (t.rank() != 2) throw Error(std::string(op) + ": expected matrix, got " + t.shape_str());
}

void require_same(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw Error(std::string(op) + ": shape mismatch " + a.shape_str() + " vs " + b.shape_str());
  }
}

// Elementwise unary op; dfn(x, y) is the local derivative.
template <typename F, typename DF>
Var unary(const Var& a, F fn, DF dfn) {
  Tensor out = a.value();
  for (double& v : out.data()) v = fn(v);
  return make_op(std::move(out), {a}, [dfn](Node& self) {
    Node& x = input(self, 0);
    Tensor& gx = x.grad_buffer();
    for (std::size_t i = 0; i < gx.size(); ++i) {
      gx[i] += self.grad[i] * dfn(x.value[i], self.value[i]);
    }
  });
}

}  // namespace

Var matmul(const Var& a, const Var& b) {
  require_matrix(a.value(), "matmul");
  require_matrix(b.value(), "matmul");
  Tensor out = nk::matmul(a.value(), b.value());
  return make_op(std::move(out), {a, b}, [](Node& self) {
    Node& A = input(self, 0);
    Node& B = input(self, 1);
    const std::size_t m = A.value.rows(), k = A.value.cols(), n = B.value.cols();
    if (A.requires_grad) {
      // dA = G * B^T
      kernels::gemm_nt(m, n, k, self.grad.data().data(), B.value.data().data(),
                       A.grad_buffer().data().data(), true);
    }
    if (B.requires_grad) {
      // dB = A^T * G
      kernels::gemm_tn(k, m, n, A.value.data().data(), self.grad.data().data(),
                       B.grad_buffer().data().data(), true);
    }
  });
}

Var matmul_nt(const Var& a, const Var& b) {
  require_matrix(a.value(), "matmul_nt");
  require_matrix(b.value(), "matmul_nt");
  if (a.value().cols() != b.value().cols()) throw Error("matmul_nt: inner dimension mismatch");
  const std::size_t m = a.value().rows(), k = a.value().cols(), n = b.value().rows();
  Tensor out = Tensor::matrix(m, n);
  kernels::gemm_nt(m, k, n, a.value().data().data(), b.value().data().data(),
                   out.data().data(), false);
  return make_op(std::move(out), {a, b}, [m, k, n](Node& self) {
    Node& A = input(self, 0);
    Node& B = input(self, 1);
    if (A.requires_grad) {
      // dA = G * B
      kernels::gemm_nn(m, n, k, self.grad.data().data(), B.value.data().data(),
                       A.grad_buffer().data().data(), true);
    }
    if (B.requires_grad) {
      // dB = G^T * A
      kernels::gemm_tn(n, m, k, self.grad.data().data(), A.value.data().data(),
                       B.grad_buffer().data().data(), true);
    }
  });
}

Var transpose(const Var& a) {
  require_matrix(a.value(), "transpose");
  const std::size_t r = a.value().rows(), c = a.value().cols();
  Tensor out = Tensor::matrix(c, r);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out.at(j, i) = a.value().at(i, j);
  return make_op(std::move(out), {a}, [r, c](Node& self) {
    Tensor& g = input(self, 0).grad_buffer();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) g.at(i, j) += self.grad.at(j, i);
  });
}

Var add(const Var& a, const Var& b) {
  require_same(a.value(), b.value(), "add");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  return make_op(std::move(out), {a, b}, [](Node& self) {
    for (std::size_t k = 0; k < 2; ++k) {
      if (!wants(self, k)) continue;
      Tensor& g = input(self, k).grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Var sub(const Var& a, const Var& b) {
  require_same(a.value(), b.value(), "sub");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  return make_op(std::move(out), {a, b}, [](Node& self) {
    if (wants(self, 0)) {
      Tensor& g = input(self, 0).grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (wants(self, 1)) {
      Tensor& g = input(self, 1).grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

Var mul(const Var& a, const Var& b) {
  require_same(a.value(), b.value(), "mul");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  return make_op(std::move(out), {a, b}, [](Node& self) {
    Node& A = input(self, 0);
    Node& B = input(self, 1);
    if (A.requires_grad) {
      Tensor& g = A.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * B.value[i];
    }
    if (B.requires_grad) {
      Tensor& g = B.grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * A.value[i];
    }
  });
}

Var scale(const Var& a, double s) {
  return unary(a, [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Var add_scalar(const Var& a, double s) {
  return unary(a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Var add_bias(const Var& x, const Var& b) {
  require_matrix(x.value(), "add_bias");
  const std::size_t r = x.value().rows(), c = x.value().cols();
  if (b.value().size() != c) throw Error("add_bias: bias length mismatch");
  Tensor out = x.value();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out.at(i, j) += b.value()[j];
  return make_op(std::move(out), {x, b}, [r, c](Node& self) {
    if (wants(self, 0)) {
      Tensor& g = input(self, 0).grad_buffer();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (wants(self, 1)) {
      Tensor& g = input(self, 1).grad_buffer();
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) g[j] += self.grad.at(i, j);
    }
  });
}

Var sum(const Var& a) {
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  return make_op(Tensor::scalar(s), {a}, [](Node& self) {
    Tensor& g = input(self, 0).grad_buffer();
    const double up = self.grad[0];
    for (double& v : g.data()) v += up;
  });
}

Var mean(const Var& a) {
  const double n = static_cast<double>(a.value().size());
  if (n == 0) throw Error("mean: empty tensor");
  return scale(sum(a), 1.0 / n);
}

Var mean_rows(const Var& x) {
  require_matrix(x.value(), "mean_rows");
  const std::size_t r = x.value().rows(), c = x.value().cols();
  if (r == 0) throw Error("mean_rows: no rows");
  Tensor out = Tensor::matrix(1, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j] += x.value().at(i, j);
  for (double& v : out.data()) v /= static_cast<double>(r);
  return make_op(std::move(out), {x}, [r, c](Node& self) {
    Tensor& g = input(self, 0).grad_buffer();
    const double inv = 1.0 / static_cast<double>(r);
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) g.at(i, j) += self.grad[j] * inv;
  });
}

Var relu(const Var& a) {
  return unary(a, [](double x) { return x > 0.0 ? x : 0.0; },
               [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var leaky_relu(const Var& a, double slope) {
  return unary(a, [slope](double x) { return x > 0.0 ? x : slope * x; },
               [slope](double x, double) { return x > 0.0 ? 1.0 : slope; });
}

Var gelu(const Var& a) {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  return unary(
      a, [](double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); },
      [kInvSqrt2Pi](double x, double) {
        const double cdf = 0.5 * (1.0 + std::erf(x * kInvSqrt2));
        return cdf + x * kInvSqrt2Pi * std::exp(-0.5 * x * x);
      });
}

Var tanh(const Var& a) {
  return unary(a, [](double x) { return std::tanh(x); },
               [](double, double y) { return 1.0 - y * y; });
}

Var sigmoid(const Var& a) {
  return unary(
      a,
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var softplus(const Var& a) {
  return unary(
      a, [](double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); },
      [](double x, double) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      });
}

Var exp(const Var& a) {
  return unary(a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var log(const Var& a) {
  return unary(a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Var square(const Var& a) {
  return unary(a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Var l2_norm(const Var& a) {
  double ss = 0.0;
  for (double v : a.value().data()) ss += v * v;
  const double norm = std::sqrt(ss);
  return make_op(Tensor::scalar(norm), {a}, [](Node& self) {
    const double norm = self.value[0];
    if (norm == 0.0) return;
    Node& x = input(self, 0);
    Tensor& g = x.grad_buffer();
    const double up = self.grad[0] / norm;
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += up * x.value[i];
  });
}

Var l2_normalize_rows(const Var& x) {
  require_matrix(x.value(), "l2_normalize_rows");
  const std::size_t r = x.value().rows(), c = x.value().cols();
  Tensor out = x.value();
  std::vector<double> norms(r);
  for (std::size_t i = 0; i < r; ++i) {
    double ss = 0.0;
    for (double v : out.row(i)) ss += v * v;
    if (ss == 0.0) throw Error("l2_normalize_rows: zero-norm vector at row " + std::to_string(i));
    norms[i] = std::sqrt(ss);
    for (double& v : out.row(i)) v /= norms[i];
  }
  return make_op(std::move(out), {x}, [r, c, norms = std::move(norms)](Node& self) {
    Tensor& g = input(self, 0).grad_buffer();
    for (std::size_t i = 0; i < r; ++i) {
      auto y = self.value.row(i);
      auto gy = self.grad.row(i);
      double dot = 0.0;
      for (std::size_t j = 0; j < c; ++j) dot += y[j] * gy[j];
      for (std::size_t j = 0; j < c; ++j) g.at(i, j) += (gy[j] - y[j] * dot) / norms[i];
    }
  });
}

Var softmax_rows(const Var& x, double temperature) {
  require_matrix(x.value(), "softmax_rows");
  Tensor out = nk::softmax(x.value(), temperature);
  const std::size_t r = out.rows(), c = out.cols();
  return make_op(std::move(out), {x}, [r, c, temperature](Node& self) {
    Tensor& g = input(self, 0).grad_buffer();
    for (std::size_t i = 0; i < r; ++i) {
      auto y = self.value.row(i);
      auto gy = self.grad.row(i);
      double dot = 0.0;
      for (std::size_t j = 0; j < c; ++j) dot += y[j] * gy[j];
      for (std::size_t j = 0; j < c; ++j) g.at(i, j) += y[j] * (gy[j] - dot) / temperature;
    }
  });
}

Var log_softmax_rows(const Var& x, double temperature) {
  require_matrix(x.value(), "log_softmax_rows");
  if (!(temperature > 0.0)) throw Error("log_softmax_rows: temperature must be positive");
  const std::size_t r = x.value().rows(), c = x.value().cols();
  Tensor out = Tensor::matrix(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    auto xi = x.value().row(i);
    double mx = -INFINITY;
    for (double v : xi) mx = std::max(mx, v / temperature);
    double s = 0.0;
    for (double v : xi) s += std::exp(v / temperature - mx);
    const double lse = mx + std::log(s);
    for (std::size_t j = 0; j < c; ++j) out.at(i, j) = xi[j] / temperature - lse;
  }
  return make_op(std::move(out), {x}, [r, c, temperature](Node& self) {
    Tensor& g = input(self, 0).grad_buffer();
    for (std::size_t i = 0; i < r; ++i) {
      auto y = self.value.row(i);
      auto gy = self.grad.row(i);
      double total = 0.0;
      for (std::size_t j = 0; j < c; ++j) total += gy[j];
      for (std::size_t j = 0; j < c; ++j) {
        g.at(i, j) += (gy[j] - std::exp(y[j]) * total) / temperature;
      }
    }
  });
}

Var layer_norm(const Var& x, const Var& gamma, const Var& beta, double eps) {
  require_matrix(x.value(), "layer_norm");
  const std::size_t r = x.value().rows(), c = x.value().cols();
  if (gamma.value().size() != c || beta.value().size() != c) {
    throw Error("layer_norm: affine parameter length mismatch");
  }
  Tensor xhat = Tensor::matrix(r, c);
  std::vector<double> inv_std(r);
  for (std::size_t i = 0; i < r; ++i) {
    auto xi = x.value().row(i);
    double mu = 0.0;
    for (double v : xi) mu += v;
    mu /= static_cast<double>(c);
    double var = 0.0;
    for (double v : xi) var += (v - mu) * (v - mu);
    var /= static_cast<double>(c);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < c; ++j) xhat.at(i, j) = (xi[j] - mu) * inv_std[i];
  }
  Tensor out = xhat;
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      out.at(i, j) = gamma.value()[j] * xhat.at(i, j) + beta.value()[j];
  return make_op(std::move(out), {x, gamma, beta},
                 [r, c, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node& self) {
                   Node& X = input(self, 0);
                   Node& G = input(self, 1);
                   Node& B = input(self, 2);
                   if (G.requires_grad || B.requires_grad) {
                     for (std::size_t i = 0; i < r; ++i)
                       for (std::size_t j = 0; j < c; ++j) {
                         if (G.requires_grad) G.grad_buffer()[j] += self.grad.at(i, j) * xhat.at(i, j);
                         if (B.requires_grad) B.grad_buffer()[j] += self.grad.at(i, j);
                       }
                   }
                   if (!X.requires_grad) return;
                   Tensor& gx = X.grad_buffer();
                   const double n = static_cast<double>(c);
                   std::vector<double> dxhat(c);
                   for (std::size_t i = 0; i < r; ++i) {
                     double s1 = 0.0, s2 = 0.0;
                     for (std::size_t j = 0; j < c; ++j) {
                       dxhat[j] = self.grad.at(i, j) * G.value[j];
                       s1 += dxhat[j];
                       s2 += dxhat[j] * xhat.at(i, j);
                     }
                     for (std::size_t j = 0; j < c; ++j) {
                       gx.at(i, j) += inv_std[i] / n * (n * dxhat[j] - s1 - xhat.at(i, j) * s2);
                     }
                   }
                 });
}

Var conv1d(const Var& x, const Var& w, std::size_t stride) {
  Tensor out = nk::conv1d(x.value(), w.value(), stride);
  return make_op(std::move(out), {x, w}, [stride](Node& self) {
    Node& X = input(self, 0);
    Node& W = input(self, 1);
    if (X.requires_grad) kernels::conv1d_backward_input(self.grad, W.value, stride, X.grad_buffer());
    if (W.requires_grad) kernels::conv1d_backward_kernel(X.value, self.grad, stride, W.grad_buffer());
  });
}

Var conv1d_input_grad(const Var& g, const Var& w, std::size_t stride, std::size_t input_len) {
  const Tensor& gv = g.value();
  const Tensor& wv = w.value();
  if (gv.rank() != 2 || wv.rank() != 3 || gv.cols() != wv.dim(2)) {
    throw Error("conv1d_input_grad: shape mismatch " + gv.shape_str() + " / " + wv.shape_str());
  }
  if (conv1d_output_length(input_len, wv.dim(0), stride) != gv.rows()) {
    throw Error("conv1d_input_grad: input length inconsistent with gradient length");
  }
  Tensor out = Tensor::matrix(input_len, wv.dim(1));
  kernels::conv1d_backward_input(gv, wv, stride, out);
  return make_op(std::move(out), {g, w}, [stride](Node& self) {
    Node& G = input(self, 0);
    Node& W = input(self, 1);
    // out is linear in g with matrix conv^T, so d/dg is the forward conv of the
    // upstream gradient; d/dw pairs upstream rows with g rows.
    if (G.requires_grad) {
      Tensor tmp = nk::conv1d(self.grad, W.value, stride);
      Tensor& gg = G.grad_buffer();
      for (std::size_t i = 0; i < gg.size(); ++i) gg[i] += tmp[i];
    }
    if (W.requires_grad) kernels::conv1d_backward_kernel(self.grad, G.value, stride, W.grad_buffer());
  });
}

Var pad_rows(const Var& x, std::size_t before, std::size_t after) {
  require_matrix(x.value(), "pad_rows");
  const std::size_t r = x.value().rows(), c = x.value().cols();
  Tensor out = Tensor::matrix(r + before + after, c);
  std::copy(x.value().data().begin(), x.value().data().end(), out.data().begin() + before * c);
  return make_op(std::move(out), {x}, [before, r, c](Node& self) {
    Tensor& g = input(self, 0).grad_buffer();
    for (std::size_t i = 0; i < r * c; ++i) g[i] += self.grad[before * c + i];
  });
}

Var slice_rows(const Var& x, std::size_t begin, std::size_t end) {
  require_matrix(x.value(), "slice_rows");
  const std::size_t c = x.value().cols();
  if (begin > end || end > x.value().rows()) throw Error("slice_rows: range out of bounds");
  Tensor out = Tensor::matrix(end - begin, c);
  std::copy(x.value().data().begin() + begin * c, x.value().data().begin() + end * c,
            out.data().begin());
  return make_op(std::move(out), {x}, [begin, c](Node& self) {
    Tensor& g = input(self, 0).grad_buffer();
    for (std::size_t i = 0; i < self.grad.size(); ++i) g[begin * c + i] += self.grad[i];
  });
}

Var slice_cols(const Var& x, std::size_t begin, std::size_t end) {
  require_matrix(x.value(), "slice_cols");
  const std::size_t r = x.value().rows(), c = x.value().cols();
  if (begin > end || end > c) throw Error("slice_cols: range out of bounds");
  const std::size_t w = end - begin;
  Tensor out = Tensor::matrix(r, w);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < w; ++j) out.at(i, j) = x.value().at(i, begin + j);
  return make_op(std::move(out), {x}, [r, w, begin](Node& self) {
    Tensor& g = input(self, 0).grad_buffer();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < w; ++j) g.at(i, begin + j) += self.grad.at(i, j);
  });
}

Var concat_rows(std::span<const Var> xs) {
  if (xs.empty()) throw Error("concat_rows: no inputs");
  const std::size_t c = xs[0].value().cols();
  std::size_t total = 0;
  for (const Var& v : xs) {
    require_matrix(v.value(), "concat_rows");
    if (v.value().cols() != c) throw Error("concat_rows: column mismatch");
    total += v.value().rows();
  }
  Tensor out = Tensor::matrix(total, c);
  std::size_t off = 0;
  for (const Var& v : xs) {
    std::copy(v.value().data().begin(), v.value().data().end(), out.data().begin() + off);
    off += v.value().size();
  }
  return make_op(std::move(out), std::vector<Var>(xs.begin(), xs.end()), [](Node& self) {
    std::size_t off = 0;
    for (auto& in : self.inputs) {
      const std::size_t n = in->value.size();
      if (in->requires_grad) {
        Tensor& g = in->grad_buffer();
        for (std::size_t i = 0; i < n; ++i) g[i] += self.grad[off + i];
      }
      off += n;
    }
  });
}

Var concat_cols(std::span<const Var> xs) {
  if (xs.empty()) throw Error("concat_cols: no inputs");
  const std::size_t r = xs[0].value().rows();
  std::size_t total = 0;
  for (const Var& v : xs) {
    require_matrix(v.value(), "concat_cols");
    if (v.value().rows() != r) throw Error("concat_cols: row mismatch");
    total += v.value().cols();
  }
  Tensor out = Tensor::matrix(r, total);
  std::size_t off = 0;
  for (const Var& v : xs) {
    const std::size_t w = v.value().cols();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < w; ++j) out.at(i, off + j) = v.value().at(i, j);
    off += w;
  }
  return make_op(std::move(out), std::vector<Var>(xs.begin(), xs.end()), [r](Node& self) {
    std::size_t off = 0;
    for (auto& in : self.inputs) {
      const std::size_t w = in->value.cols();
      if (in->requires_grad) {
        Tensor& g = in->grad_buffer();
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < w; ++j) g.at(i, j) += self.grad.at(i, off + j);
      }
      off += w;
    }
  });
}

Var pick(const Var& x, std::span<const std::pair<std::size_t, std::size_t>> index) {
  require_matrix(x.value(), "pick");
  const std::size_t r = x.value().rows(), c = x.value().cols();
  std::vector<std::pair<std::size_t, std::size_t>> idx(index.begin(), index.end());
  Tensor out(Shape{idx.size()});
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i].first >= r || idx[i].second >= c) throw Error("pick: index out of range");
    out[i] = x.value().at(idx[i].first, idx[i].second);
  }
  return make_op(std::move(out), {x}, [idx = std::move(idx)](Node& self) {
    Tensor& g = input(self, 0).grad_buffer();
    for (std::size_t i = 0; i < idx.size(); ++i) g.at(idx[i].first, idx[i].second) += self.grad[i];
  });
}

Var sum_xlogx(const Var& x) {
  double s = 0.0;
  for (double v : x.value().data()) {
    if (v < 0.0) throw Error("sum_xlogx: negative input");
    if (v > 0.0) s += v * std::log(v);
  }
  return make_op(Tensor::scalar(s), {x}, [](Node& self) {
    Node& X = input(self, 0);
    Tensor& g = X.grad_buffer();
    const double up = self.grad[0];
    // d/dx x log x = log x + 1; clamp at the boundary where it diverges.
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] += up * (std::log(std::max(X.value[i], 1e-300)) + 1.0);
    }
  });
}

Var mask_rows(const Var& x, const std::vector<bool>& mask, const Var& embedding) {
  require_matrix(x.value(), "mask_rows");
  const std::size_t r = x.value().rows(), c = x.value().cols();
  if (mask.size() != r) {
    throw Error("mask_rows: mask length " + std::to_string(mask.size()) + " vs " +
                std::to_string(r) + " frames");
  }
  if (embedding.value().size() != c) throw Error("mask_rows: embedding length mismatch");
  Tensor out = x.value();
  for (std::size_t i = 0; i < r; ++i)
    if (mask[i])
      for (std::size_t j = 0; j < c; ++j) out.at(i, j) = embedding.value()[j];
  return make_op(std::move(out), {x, embedding}, [mask, r, c](Node& self) {
    if (wants(self, 0)) {
      Tensor& g = input(self, 0).grad_buffer();
      for (std::size_t i = 0; i < r; ++i)
        if (!mask[i])
          for (std::size_t j = 0; j < c; ++j) g.at(i, j) += self.grad.at(i, j);
    }
    if (wants(self, 1)) {
      Tensor& g = input(self, 1).grad_buffer();
      for (std::size_t i = 0; i < r; ++i)
        if (mask[i])
          for (std::size_t j = 0; j < c; ++j) g[j] += self.grad.at(i, j);
    }
  });
}

}  // namespace unitforge::nk
