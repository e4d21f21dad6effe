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

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ccd/rng.hpp"

namespace ccd {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// A full-row-rank compression map phi (M x P) with everything derived from
// it: the Gram inverse (phi phi^T)^-1, the orthogonal projector
// phi^T (phi phi^T)^-1 phi onto its row space, and a lower Cholesky factor L
// of the Gram matrix used to whiten compressed observations.
//
// Immutable after construction; safe to share between threads.
class ProjectionOperator {
public:
    // Throws RankError if phi phi^T is singular or its condition number
    // exceeds kMaxCondition.
    static ProjectionOperator from_matrix(Eigen::MatrixXd phi);

    static constexpr double kMaxCondition = 1e12;

    std::size_t rows() const { return static_cast<std::size_t>(phi_.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(phi_.cols()); }

    const Eigen::MatrixXd& phi() const { return phi_; }
    const Eigen::MatrixXd& gram() const { return gram_; }
    const Eigen::MatrixXd& gram_inverse() const { return gram_inverse_; }
    const Eigen::MatrixXd& projector() const { return projector_; }
    const Eigen::MatrixXd& gram_factor() const { return lower_; }
    double log_det_gram() const { return log_det_gram_; }

    // Row-major views for the SIMD kernels.
    std::span<const double> phi_row_major() const { return {phi_rm_.data(), static_cast<std::size_t>(phi_rm_.size())}; }

    // y = phi u
    void apply(std::span<const double> u, std::span<double> y) const;
    // z = L^-1 y, so that z^T z = y^T (phi phi^T)^-1 y.
    void whiten(std::span<const double> y, std::span<double> z) const;
    Eigen::VectorXd whiten(const Eigen::VectorXd& y) const;

    // ||P x||^2 computed as ||L^-1 phi x||^2.
    double projected_energy(const Eigen::VectorXd& x) const;

private:
    ProjectionOperator() = default;

    Eigen::MatrixXd phi_;
    RowMajorMatrix phi_rm_;
    Eigen::MatrixXd gram_;
    Eigen::MatrixXd gram_inverse_;
    Eigen::MatrixXd projector_;
    Eigen::MatrixXd lower_;
    RowMajorMatrix lower_rm_;
    double log_det_gram_ = 0.0;
};

// Produces the candidate matrix for a given regeneration attempt.
using MatrixSource = std::function<Eigen::MatrixXd(unsigned attempt)>;

inline constexpr unsigned kMaxProjectionAttempts = 8;

// Draws phi with i.i.d. N(0, 1) entries from the contract's stream, moving to
// a fresh substream when a draw is rank-deficient or ill-conditioned.
// Throws DimensionError unless 1 <= M <= P, RankError after
// kMaxProjectionAttempts rejected draws.
ProjectionOperator gen_projection(std::size_t M, std::size_t P, const RngContract& rng);
ProjectionOperator gen_projection(std::size_t M, std::size_t P, const MatrixSource& source);

// rho(x) = (P / M) ||P x||^2 / ||x||^2. Throws ZeroVectorError for x = 0.
double embedding_distortion(const ProjectionOperator& op, const Eigen::VectorXd& x);

struct StableEmbeddingReport {
    double pass_fraction = 0.0;
    double worst_distortion = 0.0;  // rho farthest from 1
    std::size_t count = 0;
};

// Fraction of xs whose distortion lies in [1 - eps, 1 + eps]. Diagnostic
// only; never throws on a failed vector.
StableEmbeddingReport check_stable_embedding(const ProjectionOperator& op,
                                             std::span<const Eigen::VectorXd> xs, double eps);

// Dense matrix text format: one row per line, whitespace separated.
void save_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd load_matrix(const std::filesystem::path& path);

}  // namespace ccd
