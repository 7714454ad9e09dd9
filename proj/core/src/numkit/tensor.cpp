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

#include "unitforge/numkit/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "numkit/kernels.hpp"
#include "unitforge/error.hpp"

namespace unitforge::nk {

std::size_t shape_size(const Shape& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

Tensor::Tensor(Shape shape, double fill)
    : shape_(std::move(shape)), data_(shape_size(shape_), fill) {}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != shape_size(shape_)) {
    throw Error("tensor data length " + std::to_string(data_.size()) +
                " does not match shape " + shape_str());
  }
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= shape_.size()) throw Error("tensor axis out of range");
  return shape_[axis];
}

std::size_t Tensor::rows() const {
  if (rank() != 2) throw Error("rows() on rank-" + std::to_string(rank()) + " tensor");
  return shape_[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2) throw Error("cols() on rank-" + std::to_string(rank()) + " tensor");
  return shape_[1];
}

std::span<double> Tensor::row(std::size_t r) {
  const std::size_t c = cols();
  return std::span<double>(data_).subspan(r * c, c);
}

std::span<const double> Tensor::row(std::size_t r) const {
  const std::size_t c = cols();
  return std::span<const double>(data_).subspan(r * c, c);
}

double Tensor::item() const {
  if (data_.size() != 1) throw Error("item() on tensor of shape " + shape_str());
  return data_[0];
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

std::string Tensor::shape_str() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape_.size(); ++i) os << (i ? "," : "") << shape_[i];
  os << ']';
  return os.str();
}

std::size_t conv1d_output_length(std::size_t length, std::size_t kernel, std::size_t stride) {
  if (stride == 0) throw Error("conv1d: stride must be positive");
  if (kernel == 0) throw Error("conv1d: kernel must be positive");
  if (length < kernel) throw Error("input shorter than kernel");
  return (length - kernel) / stride + 1;
}

Tensor conv1d(const Tensor& input, const Tensor& kernels, std::size_t stride) {
  if (input.rank() != 2 || kernels.rank() != 3 || kernels.dim(1) != input.cols()) {
    throw Error("conv1d: shape mismatch input " + input.shape_str() + " kernels " +
                kernels.shape_str());
  }
  const std::size_t out_len = conv1d_output_length(input.rows(), kernels.dim(0), stride);
  Tensor out = Tensor::matrix(out_len, kernels.dim(2));
  kernels::conv1d_forward(input, kernels, stride, out);
  return out;
}

Tensor softmax(const Tensor& logits, double temperature) {
  if (!(temperature > 0.0)) throw Error("softmax: temperature must be positive");
  if (logits.rank() == 0) return Tensor::scalar(1.0);
  Tensor out = logits;
  const std::size_t n = logits.shape().back();
  if (n == 0) return out;
  double* p = out.data().data();
  for (std::size_t off = 0; off < out.size(); off += n) {
    kernels::softmax_inplace(std::span<double>(p + off, n), temperature);
  }
  return out;
}

double cosine_sim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("cosine_sim: length mismatch");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error("cosine_sim: zero-norm vector");
  const double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.cols() != b.rows()) {
    throw Error("matmul: shape mismatch " + a.shape_str() + " x " + b.shape_str());
  }
  Tensor out = Tensor::matrix(a.rows(), b.cols());
  kernels::gemm_nn(a.rows(), a.cols(), b.cols(), a.data().data(), b.data().data(),
                   out.data().data(), false);
  return out;
}

}  // namespace unitforge::nk
