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

// Closed-form performance of the collaborative compressive detector:
// Q-function machinery, error probabilities and their Chernoff bounds,
// the chi-squared law of the random-signal statistic, and the modified
// deflection coefficients under artificial noise injection.

#include <cstddef>
#include <utility>

#include "ccd/model.hpp"

namespace ccd {

// Q(x) = P(Z > x) for standard normal Z. Absolute error below 1e-12.
double q_function(double x);
// Inverse of q_function. Throws DomainError unless p in (0, 1).
double q_inverse(double p);

// ---- deterministic signal ----

// Q((1/2) sqrt(N / noise_variance) ||P s||). projector_energy = ||P s||^2.
double pe_deterministic_exact(double projector_energy, double noise_variance, std::size_t nodes);

// Embedding approximation Q((1/2) sqrt(c N snr)), snr = ||s||^2 / noise_variance.
double pe_deterministic_approx(double c, std::size_t nodes, double snr);

struct ErrorBounds {
    double lower = 0.0;
    double upper = 0.0;
};
// Bounds valid when sqrt(P/M) P-hat is an eps-stable embedding of the signal set.
ErrorBounds pe_deterministic_bounds(double c, std::size_t nodes, double snr, double eps);

// Smallest N with c N >= (4 / snr) Q^-1(delta)^2. Throws DomainError unless
// delta in (0, 0.5), c in (0, 1] and snr > 0.
std::size_t nodes_required(double c, double snr, double delta);

// (1/2) exp(-c N snr / 8)
double pe_deterministic_chernoff(double c, std::size_t nodes, double snr);

// ---- random signal ----

// Law of scale * X with X ~ chi^2_dof(noncentrality).
struct ChiSquareSpec {
    std::size_t dof = 1;
    double noncentrality = 0.0;
    double scale = 1.0;

    double mean() const { return scale * (static_cast<double>(dof) + noncentrality); }
    double variance() const { return scale * scale * 2.0 * (static_cast<double>(dof) + 2.0 * noncentrality); }
    // P(scale * X <= x) and its complement.
    double cdf(double x) const;
    double sf(double x) const;
};

// P(X <= x) for X ~ chi^2_dof(noncentrality): Poisson mixture of central
// chi-squared terms, summed outward from the Poisson mode until the
// truncated tail is below 1e-16 of the running sum, so both tails keep
// their relative accuracy.
double noncentral_chi2_cdf(double x, double dof, double noncentrality);
double noncentral_chi2_sf(double x, double dof, double noncentrality);

struct StatisticLaw {
    ChiSquareSpec h0;
    ChiSquareSpec h1;
};

// Law of the completed-square statistic sum_i ||P (u_i + (b/a) mu)||^2
// (a, b the signal and noise variances) divided by sigma_k^2: both
// hypotheses have N M degrees of freedom; H0 is listed central with scale b,
// H1 has noncentrality N delta_1, delta_1 = (||P mu||^2 / a)(1 + b/a), with
// scale a + b. Requires signal_variance > 0.
StatisticLaw test_stat_distribution(const SignalModel& model, std::size_t M, std::size_t N,
                                    double projector_mean_energy);

// Noncentrality of the same statistic under H0 when mu has a component in
// the row space of phi: N (b/a)^2 ||P mu||^2 / b. Zero iff P mu = 0, which is
// the only case where the central H0 law above is exact.
double h0_noncentrality(const SignalModel& model, std::size_t N, double projector_mean_energy);

// Threshold on the completed-square statistic equivalent to the likelihood
// ratio test: (b/a) lambda + N (b/a)^2 ||P mu||^2.
double completed_square_threshold(const SignalModel& model, std::size_t M, std::size_t N,
                                  double projector_mean_energy, const Priors& priors = {});

struct RandomErrorReport {
    double pe = 0.0;
    double pf = 0.0;
    double pd = 0.0;
    double tau0 = 0.0;
    double tau1 = 0.0;
};

// Large-NM Gaussian approximation under the embedding ||P mu||^2 ~ c ||mu||^2:
// P_F = Q(sqrt(cN) tau0), P_D = Q(-sqrt(cN) tau1), P_E = (P_F + 1 - P_D) / 2.
// Throws DomainError for nonpositive variances or P = 0.
RandomErrorReport pe_random_approx(double c, std::size_t nodes, std::size_t P, double mean_norm2,
                                   double signal_variance, double noise_variance);

// Error probabilities from the exact chi-squared laws of the statistic at a
// given projector energy (uses h0_noncentrality, equal priors by default).
RandomErrorReport pe_random_exact(const SignalModel& model, std::size_t M, std::size_t N,
                                  double projector_mean_energy, const Priors& priors = {});

// (1/4) exp(-c N tau0^2 / 2) + (1/4) exp(-c N tau1^2 / 2).
// Throws DomainError unless tau0 > 0 and tau1 > 0.
double pe_random_chernoff(double c, std::size_t nodes, double tau0, double tau1);

// ---- deflection coefficients under injection ----

struct DeflectionReport {
    double d_fc = 0.0;     // per-node deflection at the FC
    double d_ev = 0.0;     // per-node deflection at the eavesdropper
    double d_clean = 0.0;  // honest node: c ||mu||^2 / sigma^2
    double d_tilde = 0.0;  // injecting node, embedding approximation
    double p_b = 0.0;
    double p_t = 0.0;
    double p_t_eve = 0.0;
    double sigma2 = 0.0;   // signal + noise + artificial noise variance
    double r_b = 0.0;      // sigma^2 + P_t kappa^2 c ||mu||^2
};

// f (1 - P_b k)^2 / (k^2 P_t + sigma^2 / (c ||mu||^2)) + (1 - f) c ||mu||^2 / sigma^2.
// Throws DomainError for mean_norm2 <= 0, sigma2 <= 0 or c outside (0, 1].
double deflection_fc(const InjectionPolicy& policy, double c, double mean_norm2, double sigma2);
// (1 - f P_b k)^2 / (f k^2 P_t^E + sigma^2 / (c ||mu||^2))
double deflection_ev(const InjectionPolicy& policy, double c, double mean_norm2, double sigma2);

DeflectionReport deflection_report(const InjectionPolicy& policy, double c, double mean_norm2, double sigma2);

// Deflection of an injecting node's report at the FC through the rank-one
// (Sherman-Morrison) inverse of its H1 covariance, exact for the projector
// energy ||P mu||^2:
// (1 - P_b k)^2 e / sigma^2 - P_t k^2 (1 - P_b k)^2 e^2 / (sigma^2 r_b),
// r_b = sigma^2 + P_t k^2 e. Throws SingularCovarianceError if sigma2 <= 0.
double deflection_tilde_exact(const InjectionPolicy& policy, double projector_mean_energy, double sigma2);

}  // namespace ccd
