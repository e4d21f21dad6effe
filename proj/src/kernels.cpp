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

#include "ccd/kernels.hpp"

#include <atomic>
#include <cassert>

#include "ccd/errors.hpp"
#include "kernels_impl.hpp"

namespace ccd::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n)
{
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double squared_norm_scalar(const double* a, std::size_t n)
{
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
    return s;
}

double squared_distance_scalar(const double* a, const double* b, std::size_t n)
{
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

void gemv_scalar(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y)
{
    for (std::size_t r = 0; r < rows; ++r) y[r] = dot_scalar(A + r * cols, x, cols);
}

void axpy_scalar(double a, const double* x, double* y, std::size_t n)
{
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

constexpr KernelTable kScalar{
    Backend::Scalar, "scalar",
    dot_scalar, squared_norm_scalar, squared_distance_scalar, gemv_scalar, axpy_scalar,
};

bool cpu_supports(Backend backend)
{
    switch (backend) {
    case Backend::Scalar:
        return true;
    case Backend::Avx2:
#if defined(CCD_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
        return false;
#endif
    case Backend::Neon:
#if defined(CCD_HAVE_NEON_KERNELS)
        return true;  // mandatory on AArch64
#else
        return false;
#endif
    }
    return false;
}

const KernelTable* best_table()
{
    for (Backend b : {Backend::Avx2, Backend::Neon})
        if (cpu_supports(b)) return &table(b);
    return &kScalar;
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

std::vector<Backend> available_backends()
{
    std::vector<Backend> out;
    for (Backend b : {Backend::Scalar, Backend::Avx2, Backend::Neon})
        if (cpu_supports(b)) out.push_back(b);
    return out;
}

const KernelTable& table(Backend backend)
{
    if (!cpu_supports(backend))
        throw DomainError("kernel backend '" + std::string(backend_name(backend)) +
                          "' is not available on this machine");
    switch (backend) {
#if defined(CCD_HAVE_AVX2_KERNELS)
    case Backend::Avx2: return detail::avx2_table();
#endif
#if defined(CCD_HAVE_NEON_KERNELS)
    case Backend::Neon: return detail::neon_table();
#endif
    default: return kScalar;
    }
}

const KernelTable& active()
{
    const KernelTable* t = g_active.load(std::memory_order_acquire);
    if (t == nullptr) {
        t = best_table();
        g_active.store(t, std::memory_order_release);
    }
    return *t;
}

void select_backend(Backend backend) { g_active.store(&table(backend), std::memory_order_release); }

void select_auto() { g_active.store(best_table(), std::memory_order_release); }

std::string_view backend_name(Backend backend)
{
    switch (backend) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
    }
    return "unknown";
}

double dot(std::span<const double> a, std::span<const double> b)
{
    assert(a.size() == b.size());
    return active().dot(a.data(), b.data(), a.size());
}

double squared_norm(std::span<const double> a) { return active().squared_norm(a.data(), a.size()); }

double squared_distance(std::span<const double> a, std::span<const double> b)
{
    assert(a.size() == b.size());
    return active().squared_distance(a.data(), b.data(), a.size());
}

void gemv(std::span<const double> A, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y)
{
    assert(A.size() == rows * cols && x.size() == cols && y.size() == rows);
    active().gemv(A.data(), rows, cols, x.data(), y.data());
}

void axpy(double a, std::span<const double> x, std::span<double> y)
{
    assert(x.size() == y.size());
    active().axpy(a, x.data(), y.data(), x.size());
}

}  // namespace ccd::kernels
