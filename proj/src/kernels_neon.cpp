/*
   Copyright 2026 The ccdetect Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

// NEON kernels for AArch64 (Advanced SIMD is part of the base ISA there).

#include <arm_neon.h>

#include "kernels_impl.hpp"

namespace ccd::kernels::detail {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n)
{
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double s = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double squared_norm_neon(const double* a, std::size_t n) { return dot_neon(a, a, n); }

double squared_distance_neon(const double* a, const double* b, std::size_t n)
{
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        acc = vfmaq_f64(acc, d, d);
    }
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void gemv_neon(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y)
{
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot_neon(A + r * cols, x, cols);
}

void axpy_neon(double a, const double* x, double* y, std::size_t n)
{
    const float64x2_t av = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), av, vld1q_f64(x + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

constexpr KernelTable kNeon{
    Backend::Neon, "neon",
    dot_neon, squared_norm_neon, squared_distance_neon, gemv_neon, axpy_neon,
};

}  // namespace

const KernelTable& neon_table() { return kNeon; }

}  // namespace ccd::kernels::detail
