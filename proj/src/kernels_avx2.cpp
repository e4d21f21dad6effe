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

// AVX2+FMA kernels. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after the runtime CPU check in kernels.cpp.

#include <immintrin.h>

#include "kernels_impl.hpp"

namespace ccd::kernels::detail {
namespace {

inline double hsum(__m256d v)
{
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d sh = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n)
{
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    if (i + 4 <= n) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        i += 4;
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

double squared_norm_avx2(const double* a, std::size_t n) { return dot_avx2(a, a, n); }

double squared_distance_avx2(const double* a, const double* b, std::size_t n)
{
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
        acc0 = _mm256_fmadd_pd(d0, d0, acc0);
        acc1 = _mm256_fmadd_pd(d1, d1, acc1);
    }
    if (i + 4 <= n) {
        __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc0 = _mm256_fmadd_pd(d0, d0, acc0);
        i += 4;
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

// Four rows per pass so each load of x feeds four FMAs.
void gemv_avx2(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y)
{
    std::size_t r = 0;
    for (; r + 4 <= rows; r += 4) {
        const double* a0 = A + r * cols;
        const double* a1 = a0 + cols;
        const double* a2 = a1 + cols;
        const double* a3 = a2 + cols;
        __m256d s0 = _mm256_setzero_pd();
        __m256d s1 = _mm256_setzero_pd();
        __m256d s2 = _mm256_setzero_pd();
        __m256d s3 = _mm256_setzero_pd();
        std::size_t c = 0;
        for (; c + 4 <= cols; c += 4) {
            const __m256d xv = _mm256_loadu_pd(x + c);
            s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a0 + c), xv, s0);
            s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a1 + c), xv, s1);
            s2 = _mm256_fmadd_pd(_mm256_loadu_pd(a2 + c), xv, s2);
            s3 = _mm256_fmadd_pd(_mm256_loadu_pd(a3 + c), xv, s3);
        }
        double t0 = hsum(s0), t1 = hsum(s1), t2 = hsum(s2), t3 = hsum(s3);
        for (; c < cols; ++c) {
            t0 += a0[c] * x[c];
            t1 += a1[c] * x[c];
            t2 += a2[c] * x[c];
            t3 += a3[c] * x[c];
        }
        y[r] = t0;
        y[r + 1] = t1;
        y[r + 2] = t2;
        y[r + 3] = t3;
    }
    for (; r < rows; ++r) y[r] = dot_avx2(A + r * cols, x, cols);
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n)
{
    const __m256d av = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += a * x[i];
}

constexpr KernelTable kAvx2{
    Backend::Avx2, "avx2",
    dot_avx2, squared_norm_avx2, squared_distance_avx2, gemv_avx2, axpy_avx2,
};

}  // namespace

const KernelTable& avx2_table() { return kAvx2; }

}  // namespace ccd::kernels::detail
