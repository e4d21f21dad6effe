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

// Domain types shared by every module: the signal/noise model, the artificial
// noise injection policy and the full experiment scenario.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace ccd {

enum class Hypothesis { H0, H1 };

// Observation model u_i = s_i + v_i (H1) or u_i = v_i (H0), with
// s_i ~ N(mean, signal_variance I) and v_i ~ N(0, noise_variance I).
// signal_variance == 0 is the deterministic-signal case, where mean is s.
struct SignalModel {
    std::size_t ambient_dim = 0;
    Eigen::VectorXd mean;
    double signal_variance = 0.0;
    double noise_variance = 1.0;

    bool deterministic() const { return signal_variance == 0.0; }
    double mean_norm2() const { return mean.squaredNorm(); }
    // signal_variance / noise_variance
    double variance_ratio() const { return signal_variance / noise_variance; }

    friend bool operator==(const SignalModel& a, const SignalModel& b)
    {
        return a.ambient_dim == b.ambient_dim && a.mean.size() == b.mean.size() &&
               a.mean == b.mean && a.signal_variance == b.signal_variance &&
               a.noise_variance == b.noise_variance;
    }
};

// A fraction of the nodes add +W or -W (or nothing) to their observation with
// hypothesis-dependent probabilities; W ~ N(kappa * mean, art_variance I).
struct InjectionPolicy {
    double fraction = 0.0;  // share of injecting nodes
    double p10 = 0.0;       // P(+W | H0)
    double p20 = 0.0;       // P(-W | H0)
    double p11 = 0.0;       // P(+W | H1)
    double p21 = 0.0;       // P(-W | H1)
    double kappa = 0.0;
    double art_variance = 0.0;

    // P_b: shift of the injected mean difference, in units of kappa * mean.
    double mean_shift() const { return (p10 - p20) + (p21 - p11); }
    // P_t: covariance inflation of an injected report under H1.
    double spread() const { return p11 + p21 - (p11 - p21) * (p11 - p21); }
    // P_t^E: the same inflation as seen by an eavesdropper that only knows the fraction.
    double eve_spread() const { return p11 + p21 - fraction * (p11 - p21) * (p11 - p21); }

    friend bool operator==(const InjectionPolicy&, const InjectionPolicy&) = default;
};

struct Priors {
    double h0 = 0.5;
    double h1 = 0.5;

    double log_ratio() const;  // log(h0 / h1)

    friend bool operator==(const Priors&, const Priors&) = default;
};

// Quantities filled in by validate_scenario.
struct DerivedQuantities {
    double compression_ratio = 0.0;  // c = M / P
    std::size_t num_injecting = 0;   // B = round(fraction * N)
    double p_b = 0.0;
    double p_t = 0.0;
    double p_t_eve = 0.0;

    friend bool operator==(const DerivedQuantities&, const DerivedQuantities&) = default;
};

struct Scenario {
    SignalModel signal;
    std::size_t compressed_dim = 0;
    std::size_t num_nodes = 1;
    std::optional<InjectionPolicy> injection;
    Priors priors;
    std::uint64_t seed = 0;
    std::uint64_t trials = 1000;

    DerivedQuantities derived;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

// Checks every invariant and returns the scenario with `derived` populated.
// Throws DimensionError, ProbabilityError, PriorError or DomainError.
Scenario validate_scenario(Scenario raw);

// Throws ProbabilityError/DomainError if the policy is invalid.
void validate_policy(const InjectionPolicy& policy);

}  // namespace ccd
