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

// Fusion-center and eavesdropper tests on compressed observations.
//
// All tests work on whitened observations z_i = L^-1 y_i, where L is the
// Cholesky factor of phi phi^T held by the ProjectionOperator. Every density
// in the model has covariance proportional to phi phi^T, so one whitening per
// node serves the clean, Byzantine-aware and eavesdropper tests alike.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ccd/model.hpp"
#include "ccd/projection.hpp"

namespace ccd {

struct Decision {
    double statistic = 0.0;
    double threshold = 0.0;
    Hypothesis verdict = Hypothesis::H0;
};

// verdict = H1 iff statistic > threshold; ties go to H0.
Decision decide(double statistic, double threshold);

// y = phi u. Throws DimensionError on a length mismatch.
Eigen::VectorXd compress(const ProjectionOperator& op, const Eigen::VectorXd& u);

// N whitened M-vectors stored contiguously.
class WhitenedBatch {
public:
    WhitenedBatch() = default;
    WhitenedBatch(std::size_t nodes, std::size_t dim) : nodes_(nodes), dim_(dim), data_(nodes * dim) {}

    std::size_t nodes() const { return nodes_; }
    std::size_t dim() const { return dim_; }
    std::span<double> node(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
    std::span<const double> node(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }

private:
    std::size_t nodes_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

WhitenedBatch whiten_all(const ProjectionOperator& op, std::span<const Eigen::VectorXd> ys);

// sum_i y_i^T (phi phi^T)^-1 phi s
double fc_statistic_deterministic(std::span<const Eigen::VectorXd> ys, const ProjectionOperator& op,
                                  const Eigen::VectorXd& s);
// (N/2) ||P s||^2 + noise_variance * log(P0/P1); the prior term vanishes for equal priors.
double fc_threshold_deterministic(const ProjectionOperator& op, const Eigen::VectorXd& s, std::size_t nodes,
                                  double noise_variance = 1.0, const Priors& priors = {});

// (a/b) sum_i y_i^T G^-1 y_i + 2 sum_i y_i^T G^-1 phi mu with a/b the
// signal-to-noise variance ratio and G = phi phi^T.
double fc_statistic_random(std::span<const Eigen::VectorXd> ys, const ProjectionOperator& op,
                           const SignalModel& model);
// (a + b) [2 log(P0/P1) + N M log(1 + a/b)] + N ||P mu||^2
double fc_threshold_random(const SignalModel& model, std::size_t M, std::size_t N, const ProjectionOperator& op,
                           const Priors& priors = {});

// Clean fusion rule with its threshold and whitened signal direction cached.
// Picks the deterministic or random-signal statistic from the model.
class CleanDetector {
public:
    CleanDetector(const SignalModel& model, const ProjectionOperator& op, std::size_t nodes,
                  const Priors& priors = {});

    double statistic(const WhitenedBatch& batch) const;
    double threshold() const { return threshold_; }
    Decision decide(const WhitenedBatch& batch) const { return ccd::decide(statistic(batch), threshold_); }

private:
    bool deterministic_;
    double ratio_;
    Eigen::VectorXd whitened_signal_;  // L^-1 phi mu
    double threshold_;
};

// Mixture of Gaussians with covariances scale_k * base_cov sharing one base
// covariance. The plain shared-covariance mixture is the case scale_k = 1.
class GaussianMixture {
public:
    GaussianMixture(std::vector<double> weights, std::vector<Eigen::VectorXd> means, const Eigen::MatrixXd& cov);
    GaussianMixture(std::vector<double> weights, std::vector<Eigen::VectorXd> means, std::vector<double> scales,
                    const Eigen::MatrixXd& base_cov);

    std::size_t dim() const { return dim_; }
    std::size_t components() const { return weights_.size(); }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<Eigen::VectorXd>& means() const { return means_; }
    const std::vector<double>& scales() const { return scales_; }

    // log sum_k w_k N(y; mean_k, scale_k base_cov), max-shifted.
    double loglik(const Eigen::VectorXd& y) const;
    // Same for z = L^-1 y with L the lower Cholesky factor of base_cov.
    double loglik_whitened(std::span<const double> z) const;

    const Eigen::MatrixXd& base_factor() const { return lower_; }

private:
    std::size_t dim_ = 0;
    std::vector<double> weights_;
    std::vector<Eigen::VectorXd> means_;
    std::vector<double> scales_;
    Eigen::MatrixXd lower_;
    std::vector<Eigen::VectorXd> whitened_means_;
    std::vector<double> log_norm_;   // log w_k - (M/2) log(2 pi s_k) - (1/2) log det base
    std::vector<double> inv_scale_;  // 1 / s_k
};

double mixture_loglik(const Eigen::VectorXd& y, const GaussianMixture& mix);

struct MixturePair {
    GaussianMixture h0;
    GaussianMixture h1;

    // log f1(z) - log f0(z)
    double log_ratio_whitened(std::span<const double> z) const
    {
        return h1.loglik_whitened(z) - h0.loglik_whitened(z);
    }
};

struct MixtureSet {
    MixturePair fc_byz;  // injecting nodes, weights (p1, p2, 1 - p1 - p2)
    MixturePair eve;     // every node, weights rescaled by the fraction
    MixturePair clean;   // single-component densities of honest nodes
};

// Requires scenario.injection. Components: +phi D, -phi D (both carrying the
// artificial noise variance) and the unperturbed report, around 0 under H0
// and phi mu under H1, with D = kappa mu. Base covariance is phi phi^T.
MixtureSet build_mixtures(const Scenario& scenario, const ProjectionOperator& op);

// Clean pair only; valid with or without an injection policy.
MixturePair build_clean_pair(const SignalModel& model, const ProjectionOperator& op);

// Sum of per-node log-likelihood ratios, using the Byzantine mixtures where
// byz_flags is set and clean densities elsewhere, against log(P0/P1).
Decision fc_decide_with_byzantines(const WhitenedBatch& batch, const std::vector<bool>& byz_flags,
                                   const MixtureSet& mixtures, const Priors& priors);
Decision fc_decide_with_byzantines(std::span<const Eigen::VectorXd> ys, const ProjectionOperator& op,
                                   const std::vector<bool>& byz_flags, const MixtureSet& mixtures,
                                   const Priors& priors);

// Eavesdropper test: rescaled mixtures applied to every node.
Decision eve_decide(const WhitenedBatch& batch, const MixtureSet& mixtures, const Priors& priors);
Decision eve_decide(std::span<const Eigen::VectorXd> ys, const ProjectionOperator& op, const MixtureSet& mixtures,
                    const Priors& priors);

}  // namespace ccd
