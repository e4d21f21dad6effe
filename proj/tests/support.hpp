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

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "ccd/model.hpp"

namespace ccd::test {

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> n;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n(gen);
    return m;
}

inline Eigen::VectorXd gaussian_vector(Eigen::Index n, std::uint64_t seed) { return gaussian_matrix(n, 1, seed).col(0); }

// Flip probabilities used throughout the secrecy figures.
inline InjectionPolicy figure_policy(double fraction = 0.3, double kappa = 1.0, double art_variance = 0.0)
{
    InjectionPolicy p;
    p.fraction = fraction;
    p.p10 = 0.8;
    p.p20 = 0.1;
    p.p11 = 0.1;
    p.p21 = 0.8;
    p.kappa = kappa;
    p.art_variance = art_variance;
    return p;
}

inline Scenario make_scenario(std::size_t P, std::size_t M, std::size_t N, Eigen::VectorXd mean, double signal_var,
                              double noise_var, std::uint64_t seed = 1)
{
    Scenario s;
    s.signal.ambient_dim = P;
    s.signal.mean = std::move(mean);
    s.signal.signal_variance = signal_var;
    s.signal.noise_variance = noise_var;
    s.compressed_dim = M;
    s.num_nodes = N;
    s.seed = seed;
    return validate_scenario(s);
}

}  // namespace ccd::test
