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

#include "ccd/secrecy.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <optional>
#include <tuple>

#include "ccd/analytics.hpp"
#include "ccd/errors.hpp"

namespace ccd {
namespace {

constexpr double kStepTolerance = 1e-12;
constexpr double kFeasibilitySlack = 1e-12;

InjectionPolicy at(InjectionPolicy policy, double fraction, double kappa, double gamma_inv)
{
    policy.fraction = fraction;
    policy.kappa = kappa;
    policy.art_variance = gamma_inv;
    return policy;
}

// Strict lexicographic preference between two feasible grid points.
bool better(const DesignSolution& a, const DesignSolution& b)
{
    return std::make_tuple(a.d_fc_star, -a.fraction_star, a.c_star, -a.kappa_star, -a.noise_variance_star) >
           std::make_tuple(b.d_fc_star, -b.fraction_star, b.c_star, -b.kappa_star, -b.noise_variance_star);
}

}  // namespace

std::string regime_name(DesignRegime regime)
{
    return regime == DesignRegime::Perfect ? "perfect" : "constrained-grid";
}

double perfect_secrecy_kappa(double fraction, double p_b)
{
    if (!(fraction * p_b > 0.0))
        throw DomainError("perfect secrecy needs fraction * P_b > 0 (P_b = " + std::to_string(p_b) + ")");
    return 1.0 / (fraction * p_b);
}

double dfc_perfect(double c, double fraction, double p_b, double p_t, double mean_snr)
{
    if (!(fraction > 0.0 && fraction <= 1.0)) throw DomainError("fraction must lie in (0, 1]");
    if (!(p_b != 0.0)) throw DomainError("P_b must be nonzero");
    const double d = c * mean_snr;
    if (!(d > 0.0)) throw DomainError("c ||mu||^2 / sigma^2 must be positive");
    const double f = fraction;
    const double shrink = 1.0 - 1.0 / f;
    return f * shrink * shrink / (p_t / (f * f * p_b * p_b) + 1.0 / d) + (1.0 - f) * d;
}

bool high_snr_check(double mean_norm2, double sigma2, double p_b, double p_t)
{
    return mean_norm2 / sigma2 > p_b * p_b / p_t;
}

std::vector<double> linspace(double lo, double hi, std::size_t points)
{
    if (points == 0) return {};
    if (points == 1) return {lo};
    std::vector<double> out(points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) out[i] = lo + step * static_cast<double>(i);
    out.back() = hi;
    return out;
}

DesignSolution optimize_perfect(double c_max, double fraction_min, const InjectionPolicy& policy, double mean_norm2,
                                double sigma2, std::size_t grid_points)
{
    if (!(c_max > 0.0 && c_max <= 1.0)) throw DomainError("c_max must lie in (0, 1]");
    if (!(fraction_min > 0.0 && fraction_min <= 1.0)) throw DomainError("fraction_min must lie in (0, 1]");
    if (!(mean_norm2 > 0.0) || !(sigma2 > 0.0)) throw DomainError("need ||mu||^2 > 0 and sigma^2 > 0");
    const double p_b = policy.mean_shift();
    const double p_t = policy.spread();
    perfect_secrecy_kappa(fraction_min, p_b);

    const double snr = mean_norm2 / sigma2;
    DesignSolution s;
    s.regime = DesignRegime::Perfect;
    s.c_star = c_max;
    s.fraction_star = fraction_min;
    s.noise_variance_star = 0.0;

    if (!high_snr_check(c_max * mean_norm2, sigma2, p_b, p_t)) {
        s.fallback = true;
        double best = -std::numeric_limits<double>::infinity();
        for (const double f : linspace(fraction_min, 1.0, std::max<std::size_t>(grid_points, 2))) {
            const double v = dfc_perfect(c_max, f, p_b, p_t, snr);
            if (v > best) {
                best = v;
                s.fraction_star = f;
            }
        }
    }
    s.kappa_star = perfect_secrecy_kappa(s.fraction_star, p_b);
    s.d_fc_star = dfc_perfect(c_max, s.fraction_star, p_b, p_t, snr);
    s.d_ev_star = deflection_ev(at(policy, s.fraction_star, s.kappa_star, 0.0), c_max, mean_norm2, sigma2);
    return s;
}

DesignSolution optimize_constrained(double tau, const DesignGrids& grids, const InjectionPolicy& policy,
                                    double mean_norm2, double base_variance)
{
    if (!(tau >= 0.0)) throw DomainError("secrecy budget tau must be nonnegative");
    if (grids.c.empty() || grids.fraction.empty() || grids.kappa.empty() || grids.gamma_inv.empty())
        throw DomainError("design grids must be nonempty");
    if (!(base_variance > 0.0)) throw DomainError("base variance must be positive");
    const double p_b = policy.mean_shift();

    std::optional<DesignSolution> best;
    std::vector<double> kappas;
    for (const double f : grids.fraction) {
        kappas = grids.kappa;
        if (f * p_b > 0.0) kappas.push_back(perfect_secrecy_kappa(f, p_b));
        for (const double c : grids.c) {
            for (const double k : kappas) {
                for (const double g : grids.gamma_inv) {
                    const InjectionPolicy pol = at(policy, f, k, g);
                    validate_policy(pol);
                    const double sigma2 = base_variance + g;
                    DesignSolution cand;
                    cand.regime = DesignRegime::ConstrainedGrid;
                    cand.c_star = c;
                    cand.fraction_star = f;
                    cand.kappa_star = k;
                    cand.noise_variance_star = g;
                    cand.d_ev_star = deflection_ev(pol, c, mean_norm2, sigma2);
                    if (!(cand.d_ev_star <= tau + kFeasibilitySlack)) continue;
                    cand.d_fc_star = deflection_fc(pol, c, mean_norm2, sigma2);
                    if (!best || better(cand, *best)) best = cand;
                }
            }
        }
    }
    if (!best) throw InfeasibleError("no grid point satisfies D_EV <= " + std::to_string(tau));
    return *best;
}

MonotonicityReport monotonicity_scan(DeflectionQuantity quantity, DesignAxis axis, const DesignPoint& point,
                                     const InjectionPolicy& policy, double mean_norm2, double base_variance,
                                     std::span<const double> grid)
{
    MonotonicityReport r;
    r.values.reserve(grid.size());
    for (const double x : grid) {
        DesignPoint p = point;
        switch (axis) {
        case DesignAxis::CompressionRatio: p.c = x; break;
        case DesignAxis::Fraction: p.fraction = x; break;
        case DesignAxis::ArtVariance: p.gamma_inv = x; break;
        }
        if (p.perfect_secrecy) p.kappa = perfect_secrecy_kappa(p.fraction, policy.mean_shift());
        const InjectionPolicy pol = at(policy, p.fraction, p.kappa, p.gamma_inv);
        const double sigma2 = base_variance + p.gamma_inv;
        r.values.push_back(quantity == DeflectionQuantity::Fc ? deflection_fc(pol, p.c, mean_norm2, sigma2)
                                                              : deflection_ev(pol, p.c, mean_norm2, sigma2));
    }
    r.increasing = r.decreasing = r.constant = !r.values.empty();
    for (std::size_t i = 1; i < r.values.size(); ++i) {
        const double step = r.values[i] - r.values[i - 1];
        r.increasing = r.increasing && step > kStepTolerance;
        r.decreasing = r.decreasing && step < -kStepTolerance;
        r.constant = r.constant && std::abs(step) <= kStepTolerance;
    }
    return r;
}

}  // namespace ccd
