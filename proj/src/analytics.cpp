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

#include "ccd/analytics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "ccd/errors.hpp"

namespace ccd {
namespace {

void require_ratio(double c)
{
    if (!(c > 0.0 && c <= 1.0)) throw DomainError("compression ratio must lie in (0, 1]");
}

void require_deflection_inputs(double c, double mean_norm2, double sigma2)
{
    require_ratio(c);
    if (!(mean_norm2 > 0.0)) throw DomainError("deflection coefficients need ||mu||^2 > 0");
    if (!(sigma2 > 0.0)) throw DomainError("sigma^2 must be positive");
}

}  // namespace

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double q_inverse(double p)
{
    if (!(p > 0.0 && p < 1.0)) throw DomainError("q_inverse requires p in (0, 1), got " + std::to_string(p));
    return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double pe_deterministic_exact(double projector_energy, double noise_variance, std::size_t nodes)
{
    if (!(projector_energy >= 0.0)) throw DomainError("projector energy must be nonnegative");
    if (!(noise_variance > 0.0)) throw DomainError("noise variance must be positive");
    const double arg = 0.5 * std::sqrt(static_cast<double>(nodes) / noise_variance * projector_energy);
    return q_function(arg);
}

double pe_deterministic_approx(double c, std::size_t nodes, double snr)
{
    return q_function(0.5 * std::sqrt(c * static_cast<double>(nodes) * snr));
}

ErrorBounds pe_deterministic_bounds(double c, std::size_t nodes, double snr, double eps)
{
    if (!(eps >= 0.0 && eps < 1.0)) throw DomainError("eps must lie in [0, 1)");
    const double base = 0.5 * std::sqrt(c * static_cast<double>(nodes) * snr);
    return {q_function(std::sqrt(1.0 + eps) * base), q_function(std::sqrt(1.0 - eps) * base)};
}

std::size_t nodes_required(double c, double snr, double delta)
{
    require_ratio(c);
    if (!(snr > 0.0)) throw DomainError("snr must be positive");
    if (!(delta > 0.0 && delta < 0.5)) throw DomainError("target error probability must lie in (0, 0.5)");
    const double q = q_inverse(delta);
    const double bound = 4.0 / snr * q * q;
    auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(bound / c)));
    while (n > 1 && c * static_cast<double>(n - 1) >= bound) --n;
    while (c * static_cast<double>(n) < bound) ++n;
    return n;
}

double pe_deterministic_chernoff(double c, std::size_t nodes, double snr)
{
    return 0.5 * std::exp(-c * static_cast<double>(nodes) * snr / 8.0);
}

StatisticLaw test_stat_distribution(const SignalModel& model, std::size_t M, std::size_t N,
                                    double projector_mean_energy)
{
    if (!(model.signal_variance > 0.0)) throw DomainError("test_stat_distribution needs a random signal");
    const double a = model.signal_variance;
    const double b = model.noise_variance;
    const double delta1 = projector_mean_energy / a * (1.0 + b / a);
    const std::size_t dof = N * M;
    return {
        ChiSquareSpec{dof, 0.0, b},
        ChiSquareSpec{dof, static_cast<double>(N) * delta1, a + b},
    };
}

double h0_noncentrality(const SignalModel& model, std::size_t N, double projector_mean_energy)
{
    if (!(model.signal_variance > 0.0)) throw DomainError("h0_noncentrality needs a random signal");
    const double inv_ratio = model.noise_variance / model.signal_variance;
    return static_cast<double>(N) * inv_ratio * inv_ratio * projector_mean_energy / model.noise_variance;
}

double completed_square_threshold(const SignalModel& model, std::size_t M, std::size_t N,
                                  double projector_mean_energy, const Priors& priors)
{
    if (!(model.signal_variance > 0.0)) throw DomainError("completed_square_threshold needs a random signal");
    const double a = model.signal_variance;
    const double b = model.noise_variance;
    const double nm = static_cast<double>(N) * static_cast<double>(M);
    const double n = static_cast<double>(N);
    const double lambda = (a + b) * (2.0 * priors.log_ratio() + nm * std::log1p(a / b)) + n * projector_mean_energy;
    return b / a * lambda + n * (b / a) * (b / a) * projector_mean_energy;
}

RandomErrorReport pe_random_approx(double c, std::size_t nodes, std::size_t P, double mean_norm2,
                                   double signal_variance, double noise_variance)
{
    if (!(signal_variance > 0.0) || !(noise_variance > 0.0))
        throw DomainError("pe_random_approx needs positive signal and noise variances");
    if (P == 0) throw DomainError("ambient dimension must be positive");
    if (!(mean_norm2 >= 0.0)) throw DomainError("||mu||^2 must be nonnegative");
    if (!(c >= 0.0)) throw DomainError("compression ratio must be nonnegative");

    const double p = static_cast<double>(P);
    const double r = signal_variance / noise_variance;
    const double log_term = std::log1p(r);
    const double m = mean_norm2 / signal_variance;
    const double delta = m * (1.0 + 1.0 / r);

    RandomErrorReport out;
    out.tau0 = std::sqrt(p / 2.0) * ((1.0 + 1.0 / r) * (log_term + m / p) - 1.0);
    out.tau1 = std::sqrt((p + delta) / 2.0) * (1.0 - (p * log_term + m) / (r * (p + delta)));
    const double scale = std::sqrt(c * static_cast<double>(nodes));
    out.pf = q_function(scale * out.tau0);
    out.pd = q_function(-scale * out.tau1);
    out.pe = 0.5 * out.pf + 0.5 * (1.0 - out.pd);
    return out;
}

RandomErrorReport pe_random_exact(const SignalModel& model, std::size_t M, std::size_t N,
                                  double projector_mean_energy, const Priors& priors)
{
    StatisticLaw law = test_stat_distribution(model, M, N, projector_mean_energy);
    law.h0.noncentrality = h0_noncentrality(model, N, projector_mean_energy);
    const double tau = completed_square_threshold(model, M, N, projector_mean_energy, priors);
    RandomErrorReport out;
    out.pf = law.h0.sf(tau);
    out.pd = law.h1.sf(tau);
    out.pe = priors.h0 * out.pf + priors.h1 * (1.0 - out.pd);
    return out;
}

double pe_random_chernoff(double c, std::size_t nodes, double tau0, double tau1)
{
    if (!(tau0 > 0.0) || !(tau1 > 0.0)) throw DomainError("Chernoff bound needs tau0 > 0 and tau1 > 0");
    const double cn = c * static_cast<double>(nodes);
    return 0.25 * std::exp(-0.5 * cn * tau0 * tau0) + 0.25 * std::exp(-0.5 * cn * tau1 * tau1);
}

double deflection_fc(const InjectionPolicy& policy, double c, double mean_norm2, double sigma2)
{
    require_deflection_inputs(c, mean_norm2, sigma2);
    const double f = policy.fraction;
    const double k = policy.kappa;
    const double shift = 1.0 - policy.mean_shift() * k;
    const double clean = c * mean_norm2 / sigma2;
    return f * shift * shift / (k * k * policy.spread() + 1.0 / clean) + (1.0 - f) * clean;
}

double deflection_ev(const InjectionPolicy& policy, double c, double mean_norm2, double sigma2)
{
    require_deflection_inputs(c, mean_norm2, sigma2);
    const double f = policy.fraction;
    const double k = policy.kappa;
    const double shift = 1.0 - f * policy.mean_shift() * k;
    const double clean = c * mean_norm2 / sigma2;
    return shift * shift / (f * k * k * policy.eve_spread() + 1.0 / clean);
}

DeflectionReport deflection_report(const InjectionPolicy& policy, double c, double mean_norm2, double sigma2)
{
    DeflectionReport r;
    r.d_fc = deflection_fc(policy, c, mean_norm2, sigma2);
    r.d_ev = deflection_ev(policy, c, mean_norm2, sigma2);
    r.p_b = policy.mean_shift();
    r.p_t = policy.spread();
    r.p_t_eve = policy.eve_spread();
    r.sigma2 = sigma2;
    r.d_clean = c * mean_norm2 / sigma2;
    const double k = policy.kappa;
    const double shift = 1.0 - r.p_b * k;
    r.d_tilde = shift * shift / (k * k * r.p_t + 1.0 / r.d_clean);
    r.r_b = sigma2 + r.p_t * k * k * c * mean_norm2;
    return r;
}

double deflection_tilde_exact(const InjectionPolicy& policy, double projector_mean_energy, double sigma2)
{
    if (!(sigma2 > 0.0)) throw SingularCovarianceError("sigma^2 must be positive");
    if (!(projector_mean_energy >= 0.0)) throw DomainError("projector energy must be nonnegative");
    const double k = policy.kappa;
    const double e = projector_mean_energy;
    const double pt = policy.spread();
    const double shift = 1.0 - policy.mean_shift() * k;
    const double r_b = sigma2 + pt * k * k * e;
    return shift * shift * e / sigma2 - pt * k * k * shift * shift * e * e / (sigma2 * r_b);
}

}  // namespace ccd
