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

// System design under the secrecy constraint: the closed-form optimum in the
// perfect secrecy regime and an exhaustive grid solver for D_EV <= tau.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccd/model.hpp"

namespace ccd {

enum class DesignRegime { Perfect, ConstrainedGrid };

std::string regime_name(DesignRegime regime);  // "perfect" | "constrained-grid"

struct DesignSolution {
    double c_star = 0.0;
    double fraction_star = 0.0;
    double kappa_star = 0.0;
    double noise_variance_star = 0.0;  // artificial noise variance gamma^-1
    double d_fc_star = 0.0;
    double d_ev_star = 0.0;
    DesignRegime regime = DesignRegime::Perfect;
    // Perfect regime outside high SNR: the fraction came from a grid scan,
    // not from the closed-form rule.
    bool fallback = false;
};

// 1 / (fraction P_b). Throws DomainError if fraction P_b <= 0.
double perfect_secrecy_kappa(double fraction, double p_b);

// D_FC at kappa = 1 / (f P_b):
// f (1 - 1/f)^2 / (P_t / (f^2 P_b^2) + 1/D) + (1 - f) D, D = c * mean_snr,
// mean_snr = ||mu||^2 / sigma^2.
double dfc_perfect(double c, double fraction, double p_b, double p_t, double mean_snr);

// mean_norm2 / sigma2 > P_b^2 / P_t, strictly.
bool high_snr_check(double mean_norm2, double sigma2, double p_b, double p_t);

inline constexpr std::size_t kDefaultGridPoints = 50;

// Perfect secrecy with c = c_max, f = f_min and deterministic injected noise.
// The regime test is made on the compressed energy c_max ||mu||^2; when it
// fails, f is chosen by a scan of grid_points values over [f_min, 1] and the
// solution is flagged. sigma2 excludes artificial noise.
DesignSolution optimize_perfect(double c_max, double fraction_min, const InjectionPolicy& policy, double mean_norm2,
                                double sigma2, std::size_t grid_points = kDefaultGridPoints);

struct DesignGrids {
    std::vector<double> c;
    std::vector<double> fraction;
    std::vector<double> kappa;
    std::vector<double> gamma_inv;
};

// Evenly spaced, both ends included.
std::vector<double> linspace(double lo, double hi, std::size_t points);

// Maximizes D_FC over the grid subject to D_EV <= tau (+1e-12). For each
// fraction the kappa grid is extended with 1 / (f P_b) so that the perfect
// secrecy point is always a candidate. Ties go to smaller fraction, then
// larger c, smaller kappa, smaller gamma_inv. base_variance is
// signal + sensor noise variance. Throws InfeasibleError when no point is
// feasible, DomainError for empty grids or tau < 0.
DesignSolution optimize_constrained(double tau, const DesignGrids& grids, const InjectionPolicy& policy,
                                    double mean_norm2, double base_variance);

enum class DeflectionQuantity { Fc, Ev };
enum class DesignAxis { CompressionRatio, Fraction, ArtVariance };

struct DesignPoint {
    double c = 1.0;
    double fraction = 1.0;
    double kappa = 0.0;
    double gamma_inv = 0.0;
    // Recompute kappa = 1 / (f P_b) at every point.
    bool perfect_secrecy = false;
};

struct MonotonicityReport {
    std::vector<double> values;
    bool increasing = false;  // every step > 1e-12
    bool decreasing = false;  // every step < -1e-12
    bool constant = false;    // every |step| <= 1e-12
};

// Evaluates the deflection along an ascending grid with the other
// coordinates fixed at `point`.
MonotonicityReport monotonicity_scan(DeflectionQuantity quantity, DesignAxis axis, const DesignPoint& point,
                                     const InjectionPolicy& policy, double mean_norm2, double base_variance,
                                     std::span<const double> grid);

}  // namespace ccd
