// Copyright 2026 The roughflow Authors
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

// Thin FFTW wrapper for the n x n periodic grid. Plans are created once per
// size and shared; execution goes through the new-array interface, which is
// thread-safe.

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>

namespace roughflow::detail {

class FftPlan2d {
 public:
  explicit FftPlan2d(int n) : n_(n) {
    auto* in = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
    auto* out = fftw_alloc_complex(static_cast<std::size_t>(n) * n);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    forward_ = fftw_plan_dft_2d(n, n, in, out, FFTW_FORWARD, flags);
    backward_ = fftw_plan_dft_2d(n, n, in, out, FFTW_BACKWARD, flags);
    fftw_free(in);
    fftw_free(out);
  }
  ~FftPlan2d() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }
  FftPlan2d(const FftPlan2d&) = delete;
  FftPlan2d& operator=(const FftPlan2d&) = delete;

  // Unnormalized: out_k = sum_j in_j exp(-i k.x_j).
  void forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const {
    fftw_execute_dft(forward_, as_fftw(in), reinterpret_cast<fftw_complex*>(out.data()));
  }
  // Unnormalized: out_j = sum_k in_k exp(+i k.x_j).
  void backward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const {
    fftw_execute_dft(backward_, as_fftw(in), reinterpret_cast<fftw_complex*>(out.data()));
  }

  int n() const noexcept { return n_; }

 private:
  static fftw_complex* as_fftw(std::span<const std::complex<double>> s) {
    // FFTW never writes through the input pointer of an out-of-place plan.
    return reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(s.data()));
  }

  int n_;
  fftw_plan forward_{};
  fftw_plan backward_{};
};

inline const FftPlan2d& fft_plan(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<FftPlan2d>> plans;
  std::lock_guard lock(mutex);
  auto& slot = plans[n];
  if (!slot) slot = std::make_unique<FftPlan2d>(n);
  return *slot;
}

}  // namespace roughflow::detail
