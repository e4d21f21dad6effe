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

#pragma once

// Dense double-precision kernels used on the Monte Carlo hot path.
//
// Every kernel has a portable scalar reference implementation. On x86-64 an
// AVX2+FMA variant and on AArch64 a NEON variant are compiled alongside it;
// the fastest one the running CPU supports is picked on first use. Variants
// reassociate sums, so they agree with the reference to rounding, not bitwise.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace ccd::kernels {

enum class Backend { Scalar, Avx2, Neon };

struct KernelTable {
    Backend backend;
    std::string_view name;
    double (*dot)(const double* a, const double* b, std::size_t n);
    double (*squared_norm)(const double* a, std::size_t n);
    double (*squared_distance)(const double* a, const double* b, std::size_t n);
    // y[r] = sum_c A[r*cols + c] * x[c], A row-major.
    void (*gemv)(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y);
    // y += a * x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_table();

// Backends compiled into this build and supported by the running CPU.
std::vector<Backend> available_backends();
const KernelTable& table(Backend backend);

// Process-wide selection. Auto picks the best available backend.
const KernelTable& active();
void select_backend(Backend backend);
void select_auto();

std::string_view backend_name(Backend backend);

// Span wrappers over the active table.
double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);
double squared_distance(std::span<const double> a, std::span<const double> b);
void gemv(std::span<const double> A, std::size_t rows, std::size_t cols,
          std::span<const double> x, std::span<double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);

}  // namespace ccd::kernels
