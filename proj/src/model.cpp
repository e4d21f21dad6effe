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

#include "ccd/model.hpp"

#include <cmath>
#include <string>

#include "ccd/errors.hpp"

namespace ccd {
namespace {

void check_probability(double p, const char* name)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw ProbabilityError(std::string(name) + " = " + std::to_string(p) + " is outside [0, 1]");
}

}  // namespace

double Priors::log_ratio() const { return std::log(h0 / h1); }

void validate_policy(const InjectionPolicy& policy)
{
    if (!(policy.fraction > 0.0 && policy.fraction <= 1.0))
        throw ProbabilityError("injection fraction must lie in (0, 1]");
    check_probability(policy.p10, "p10");
    check_probability(policy.p20, "p20");
    check_probability(policy.p11, "p11");
    check_probability(policy.p21, "p21");
    if (policy.p10 + policy.p20 > 1.0) throw ProbabilityError("p10 + p20 exceeds 1");
    if (policy.p11 + policy.p21 > 1.0) throw ProbabilityError("p11 + p21 exceeds 1");
    if (!(policy.kappa >= 0.0) || !std::isfinite(policy.kappa))
        throw DomainError("kappa must be a finite nonnegative number");
    if (!(policy.art_variance >= 0.0) || !std::isfinite(policy.art_variance))
        throw DomainError("art_variance must be a finite nonnegative number");
}

Scenario validate_scenario(Scenario s)
{
    const std::size_t P = s.signal.ambient_dim;
    const std::size_t M = s.compressed_dim;
    if (P == 0) throw DimensionError("ambient_dim must be at least 1");
    if (M == 0 || M > P)
        throw DimensionError("compressed_dim = " + std::to_string(M) + " must lie in [1, ambient_dim = " +
                             std::to_string(P) + "]");
    if (static_cast<std::size_t>(s.signal.mean.size()) != P)
        throw DimensionError("mean has length " + std::to_string(s.signal.mean.size()) + ", expected " +
                             std::to_string(P));
    if (s.num_nodes == 0) throw DimensionError("num_nodes must be at least 1");
    if (!s.signal.mean.allFinite()) throw DomainError("mean has non-finite entries");
    if (!(s.signal.noise_variance > 0.0) || !std::isfinite(s.signal.noise_variance))
        throw DomainError("noise_variance must be positive");
    if (!(s.signal.signal_variance >= 0.0) || !std::isfinite(s.signal.signal_variance))
        throw DomainError("signal_variance must be nonnegative");
    if (s.trials == 0) throw DomainError("trials must be positive");

    check_probability(s.priors.h0, "prior_h0");
    check_probability(s.priors.h1, "prior_h1");
    if (s.priors.h0 == 0.0 || s.priors.h1 == 0.0) throw PriorError("priors must both be positive");
    if (std::abs(s.priors.h0 + s.priors.h1 - 1.0) > 1e-12) throw PriorError("priors must sum to 1");

    DerivedQuantities d;
    d.compression_ratio = static_cast<double>(M) / static_cast<double>(P);
    if (s.injection) {
        validate_policy(*s.injection);
        const InjectionPolicy& p = *s.injection;
        d.num_injecting = static_cast<std::size_t>(std::llround(p.fraction * static_cast<double>(s.num_nodes)));
        d.p_b = p.mean_shift();
        d.p_t = p.spread();
        d.p_t_eve = p.eve_spread();
    }
    s.derived = d;
    return s;
}

}  // namespace ccd
