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

#include <cmath>
#include <cstddef>

#include <boost/math/special_functions/gamma.hpp>

#include "ccd/analytics.hpp"
#include "ccd/errors.hpp"

namespace ccd {
namespace {

constexpr double kRelativeTail = 1e-16;
constexpr int kMaxTerms = 1'000'000;

// sum_j Pois(j; lambda) * central(dof + 2j) with lambda = noncentrality / 2,
// summed outward from the Poisson mode. Past the mode the weights fall at
// least geometrically, so the unvisited mass on either side is bounded by
// w q / (1 - q); multiplied by the largest central value still to come it
// bounds the truncation error, and each side stops once that bound is below
// kRelativeTail of the running sum. `rising` says whether central grows
// with its degrees of freedom (true for upper tails).
template <class Central>
double poisson_mixture(double dof, double noncentrality, bool rising, Central central)
{
    const double lambda = 0.5 * noncentrality;
    const double j0 = std::floor(lambda);
    const double w0 = std::exp(-lambda + j0 * std::log(lambda) - std::lgamma(j0 + 1.0));
    auto negligible = [](double bound, double sum) { return bound <= kRelativeTail * sum || bound < 1e-300; };

    double sum = 0.0;
    const double floor_cap = rising ? 0.0 : central(dof);
    double w = w0;
    for (double j = j0; j >= 0.0; j -= 1.0) {
        const double c = central(dof + 2.0 * j);
        sum += w * c;
        if (j == 0.0) break;
        w *= j / lambda;
        const double q = (j - 1.0) / lambda;
        if (q < 1.0 && negligible(w / (1.0 - q) * (rising ? c : floor_cap), sum)) break;
    }

    w = w0;
    double j = j0;
    for (int n = 0; n < kMaxTerms; ++n) {
        j += 1.0;
        w *= lambda / j;
        const double c = central(dof + 2.0 * j);
        sum += w * c;
        const double q = lambda / (j + 1.0);
        if (w == 0.0 || (q < 1.0 && negligible(w * q / (1.0 - q) * (rising ? 1.0 : c), sum))) break;
    }
    return sum;
}

void check_args(double dof, double noncentrality)
{
    if (!(dof > 0.0)) throw DomainError("chi-squared degrees of freedom must be positive");
    if (!(noncentrality >= 0.0) || !std::isfinite(noncentrality))
        throw DomainError("noncentrality must be finite and nonnegative");
}

}  // namespace

double noncentral_chi2_cdf(double x, double dof, double noncentrality)
{
    check_args(dof, noncentrality);
    if (!(x > 0.0)) return 0.0;
    if (x == INFINITY) return 1.0;
    const double half_x = 0.5 * x;
    auto central = [half_x](double k) { return boost::math::gamma_p(0.5 * k, half_x); };
    if (noncentrality == 0.0) return central(dof);
    return std::min(1.0, poisson_mixture(dof, noncentrality, false, central));
}

double noncentral_chi2_sf(double x, double dof, double noncentrality)
{
    check_args(dof, noncentrality);
    if (!(x > 0.0)) return 1.0;
    if (x == INFINITY) return 0.0;
    const double half_x = 0.5 * x;
    auto central = [half_x](double k) { return boost::math::gamma_q(0.5 * k, half_x); };
    if (noncentrality == 0.0) return central(dof);
    return std::min(1.0, poisson_mixture(dof, noncentrality, true, central));
}

double ChiSquareSpec::cdf(double x) const
{
    return noncentral_chi2_cdf(x / scale, static_cast<double>(dof), noncentrality);
}

double ChiSquareSpec::sf(double x) const
{
    return noncentral_chi2_sf(x / scale, static_cast<double>(dof), noncentrality);
}

}  // namespace ccd
