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

#include "ccd/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ccd/errors.hpp"
#include "ccd/kernels.hpp"

namespace ccd {
namespace {

std::span<const double> as_span(const Eigen::VectorXd& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

void check_signal_length(const ProjectionOperator& op, const Eigen::VectorXd& s)
{
    if (static_cast<std::size_t>(s.size()) != op.cols())
        throw DimensionError("signal has length " + std::to_string(s.size()) + ", expected " +
                             std::to_string(op.cols()));
}

Eigen::VectorXd whitened_direction(const ProjectionOperator& op, const Eigen::VectorXd& x)
{
    return op.whiten(compress(op, x));
}

}  // namespace

Decision decide(double statistic, double threshold)
{
    return {statistic, threshold, statistic > threshold ? Hypothesis::H1 : Hypothesis::H0};
}

Eigen::VectorXd compress(const ProjectionOperator& op, const Eigen::VectorXd& u)
{
    if (static_cast<std::size_t>(u.size()) != op.cols())
        throw DimensionError("compress: observation has length " + std::to_string(u.size()) + ", expected " +
                             std::to_string(op.cols()));
    Eigen::VectorXd y(op.rows());
    op.apply(as_span(u), {y.data(), op.rows()});
    return y;
}

WhitenedBatch whiten_all(const ProjectionOperator& op, std::span<const Eigen::VectorXd> ys)
{
    WhitenedBatch batch(ys.size(), op.rows());
    for (std::size_t i = 0; i < ys.size(); ++i) {
        if (static_cast<std::size_t>(ys[i].size()) != op.rows())
            throw DimensionError("compressed observation " + std::to_string(i) + " has length " +
                                 std::to_string(ys[i].size()) + ", expected " + std::to_string(op.rows()));
        op.whiten(as_span(ys[i]), batch.node(i));
    }
    return batch;
}

double fc_statistic_deterministic(std::span<const Eigen::VectorXd> ys, const ProjectionOperator& op,
                                  const Eigen::VectorXd& s)
{
    check_signal_length(op, s);
    const WhitenedBatch batch = whiten_all(op, ys);
    const Eigen::VectorXd w = whitened_direction(op, s);
    double total = 0.0;
    for (std::size_t i = 0; i < batch.nodes(); ++i) total += kernels::dot(batch.node(i), as_span(w));
    return total;
}

double fc_threshold_deterministic(const ProjectionOperator& op, const Eigen::VectorXd& s, std::size_t nodes,
                                  double noise_variance, const Priors& priors)
{
    check_signal_length(op, s);
    return 0.5 * static_cast<double>(nodes) * op.projected_energy(s) + noise_variance * priors.log_ratio();
}

double fc_statistic_random(std::span<const Eigen::VectorXd> ys, const ProjectionOperator& op,
                           const SignalModel& model)
{
    check_signal_length(op, model.mean);
    const WhitenedBatch batch = whiten_all(op, ys);
    const Eigen::VectorXd w = whitened_direction(op, model.mean);
    double energy = 0.0;
    double cross = 0.0;
    for (std::size_t i = 0; i < batch.nodes(); ++i) {
        energy += kernels::squared_norm(batch.node(i));
        cross += kernels::dot(batch.node(i), as_span(w));
    }
    return model.variance_ratio() * energy + 2.0 * cross;
}

double fc_threshold_random(const SignalModel& model, std::size_t M, std::size_t N, const ProjectionOperator& op,
                           const Priors& priors)
{
    check_signal_length(op, model.mean);
    if (M != op.rows()) throw DimensionError("fc_threshold_random: M does not match the operator");
    const double total_var = model.signal_variance + model.noise_variance;
    const double nm = static_cast<double>(N) * static_cast<double>(M);
    return total_var * (2.0 * priors.log_ratio() + nm * std::log1p(model.variance_ratio())) +
           static_cast<double>(N) * op.projected_energy(model.mean);
}

CleanDetector::CleanDetector(const SignalModel& model, const ProjectionOperator& op, std::size_t nodes,
                             const Priors& priors)
    : deterministic_(model.deterministic()),
      ratio_(model.variance_ratio()),
      whitened_signal_(whitened_direction(op, model.mean)),
      threshold_(deterministic_
                     ? fc_threshold_deterministic(op, model.mean, nodes, model.noise_variance, priors)
                     : fc_threshold_random(model, op.rows(), nodes, op, priors))
{
}

double CleanDetector::statistic(const WhitenedBatch& batch) const
{
    const auto w = as_span(whitened_signal_);
    double cross = 0.0;
    for (std::size_t i = 0; i < batch.nodes(); ++i) cross += kernels::dot(batch.node(i), w);
    if (deterministic_) return cross;
    double energy = 0.0;
    for (std::size_t i = 0; i < batch.nodes(); ++i) energy += kernels::squared_norm(batch.node(i));
    return ratio_ * energy + 2.0 * cross;
}

GaussianMixture::GaussianMixture(std::vector<double> weights, std::vector<Eigen::VectorXd> means,
                                 const Eigen::MatrixXd& cov)
    : GaussianMixture(weights, std::move(means), std::vector<double>(weights.size(), 1.0), cov)
{
}

GaussianMixture::GaussianMixture(std::vector<double> weights, std::vector<Eigen::VectorXd> means,
                                 std::vector<double> scales, const Eigen::MatrixXd& base_cov)
    : weights_(std::move(weights)), means_(std::move(means)), scales_(std::move(scales))
{
    const std::size_t K = weights_.size();
    if (K == 0) throw DimensionError("mixture needs at least one component");
    if (means_.size() != K || scales_.size() != K) throw DimensionError("mixture component lists differ in length");
    dim_ = static_cast<std::size_t>(base_cov.rows());
    if (base_cov.cols() != base_cov.rows() || dim_ == 0) throw DimensionError("covariance must be square");
    double total = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0 && w <= 1.0)) throw ProbabilityError("mixture weight outside [0, 1]");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw ProbabilityError("mixture weights do not sum to 1");
    for (const auto& m : means_)
        if (static_cast<std::size_t>(m.size()) != dim_) throw DimensionError("mixture mean has the wrong length");
    for (double s : scales_)
        if (!(s > 0.0) || !std::isfinite(s)) throw SingularCovarianceError("component covariance scale must be positive");

    if (!base_cov.isApprox(base_cov.transpose(), 1e-12) || !base_cov.allFinite())
        throw SingularCovarianceError("covariance is not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(base_cov);
    if (llt.info() != Eigen::Success) throw SingularCovarianceError("covariance is not positive definite");
    lower_ = llt.matrixL();
    const double min_pivot = lower_.diagonal().minCoeff();
    if (!(min_pivot > 0.0) || lower_.diagonal().maxCoeff() / min_pivot > 1e8)
        throw SingularCovarianceError("covariance is numerically singular");

    const double log_det = 2.0 * lower_.diagonal().array().log().sum();
    const double M = static_cast<double>(dim_);
    whitened_means_.reserve(K);
    for (std::size_t k = 0; k < K; ++k) {
        whitened_means_.push_back(lower_.triangularView<Eigen::Lower>().solve(means_[k]));
        const double lw = weights_[k] > 0.0 ? std::log(weights_[k]) : -std::numeric_limits<double>::infinity();
        log_norm_.push_back(lw - 0.5 * M * std::log(2.0 * std::numbers::pi * scales_[k]) - 0.5 * log_det);
        inv_scale_.push_back(1.0 / scales_[k]);
    }
}

double GaussianMixture::loglik_whitened(std::span<const double> z) const
{
    if (z.size() != dim_) throw DimensionError("mixture_loglik: observation has the wrong length");
    const auto& k = kernels::active();
    const std::size_t K = weights_.size();
    // Up to three components in this model; small fixed buffer avoids allocation.
    double terms_small[8];
    std::vector<double> terms_big;
    double* terms = terms_small;
    if (K > 8) {
        terms_big.resize(K);
        terms = terms_big.data();
    }
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < K; ++c) {
        if (weights_[c] == 0.0) {
            terms[c] = -std::numeric_limits<double>::infinity();
            continue;
        }
        const double d2 = k.squared_distance(z.data(), whitened_means_[c].data(), dim_);
        terms[c] = log_norm_[c] - 0.5 * d2 * inv_scale_[c];
        peak = std::max(peak, terms[c]);
    }
    double acc = 0.0;
    for (std::size_t c = 0; c < K; ++c)
        if (weights_[c] != 0.0) acc += std::exp(terms[c] - peak);
    return peak + std::log(acc);
}

double GaussianMixture::loglik(const Eigen::VectorXd& y) const
{
    if (static_cast<std::size_t>(y.size()) != dim_) throw DimensionError("mixture_loglik: observation has the wrong length");
    const Eigen::VectorXd z = lower_.triangularView<Eigen::Lower>().solve(y);
    return loglik_whitened(as_span(z));
}

double mixture_loglik(const Eigen::VectorXd& y, const GaussianMixture& mix) { return mix.loglik(y); }

MixturePair build_clean_pair(const SignalModel& model, const ProjectionOperator& op)
{
    check_signal_length(op, model.mean);
    const auto M = static_cast<Eigen::Index>(op.rows());
    const Eigen::VectorXd signal = compress(op, model.mean);
    return {
        GaussianMixture({1.0}, {Eigen::VectorXd::Zero(M)}, {model.noise_variance}, op.gram()),
        GaussianMixture({1.0}, {signal}, {model.signal_variance + model.noise_variance}, op.gram()),
    };
}

MixtureSet build_mixtures(const Scenario& scenario, const ProjectionOperator& op)
{
    if (!scenario.injection) throw DomainError("build_mixtures requires an injection policy");
    const SignalModel& m = scenario.signal;
    const InjectionPolicy& p = *scenario.injection;
    check_signal_length(op, m.mean);

    const Eigen::VectorXd signal = compress(op, m.mean);
    const Eigen::VectorXd offset = p.kappa * signal;  // phi D with D = kappa mu
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(op.rows()));

    const double v0 = m.noise_variance;
    const double v1 = m.signal_variance + m.noise_variance;
    const double g = p.art_variance;

    auto pair = [&](double w10, double w20, double w11, double w21) {
        return MixturePair{
            GaussianMixture({w10, w20, 1.0 - w10 - w20}, {offset, -offset, zero}, {v0 + g, v0 + g, v0}, op.gram()),
            GaussianMixture({w11, w21, 1.0 - w11 - w21}, {signal + offset, signal - offset, signal},
                            {v1 + g, v1 + g, v1}, op.gram()),
        };
    };
    const double f = p.fraction;
    return MixtureSet{
        pair(p.p10, p.p20, p.p11, p.p21),
        pair(f * p.p10, f * p.p20, f * p.p11, f * p.p21),
        build_clean_pair(m, op),
    };
}

Decision fc_decide_with_byzantines(const WhitenedBatch& batch, const std::vector<bool>& byz_flags,
                                   const MixtureSet& mixtures, const Priors& priors)
{
    if (byz_flags.size() != batch.nodes()) throw DimensionError("byz_flags must have one entry per node");
    double llr = 0.0;
    for (std::size_t i = 0; i < batch.nodes(); ++i) {
        const MixturePair& pair = byz_flags[i] ? mixtures.fc_byz : mixtures.clean;
        llr += pair.log_ratio_whitened(batch.node(i));
    }
    return decide(llr, priors.log_ratio());
}

Decision fc_decide_with_byzantines(std::span<const Eigen::VectorXd> ys, const ProjectionOperator& op,
                                   const std::vector<bool>& byz_flags, const MixtureSet& mixtures,
                                   const Priors& priors)
{
    return fc_decide_with_byzantines(whiten_all(op, ys), byz_flags, mixtures, priors);
}

Decision eve_decide(const WhitenedBatch& batch, const MixtureSet& mixtures, const Priors& priors)
{
    double llr = 0.0;
    for (std::size_t i = 0; i < batch.nodes(); ++i) llr += mixtures.eve.log_ratio_whitened(batch.node(i));
    return decide(llr, priors.log_ratio());
}

Decision eve_decide(std::span<const Eigen::VectorXd> ys, const ProjectionOperator& op, const MixtureSet& mixtures,
                    const Priors& priors)
{
    return eve_decide(whiten_all(op, ys), mixtures, priors);
}

}  // namespace ccd
