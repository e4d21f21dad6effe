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

// Trial-level simulation of the sensor network and empirical error rates.
//
// Trial t draws everything from the substream (seed, t) and tests H0 when t
// is even, H1 when t is odd, so any contiguous block of trials splits evenly
// between the hypotheses. Results depend only on (scenario, operator, seed,
// trial count), never on the number of workers.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccd/detection.hpp"
#include "ccd/model.hpp"
#include "ccd/projection.hpp"
#include "ccd/rng.hpp"

namespace ccd {

struct TrialOutcome {
    Hypothesis truth = Hypothesis::H0;
    Decision fc;
    std::optional<Decision> eve;  // present when the scenario injects noise
};

inline Hypothesis trial_hypothesis(std::uint64_t trial) { return trial % 2 == 0 ? Hypothesis::H0 : Hypothesis::H1; }

// Owns the per-node workspace for one thread. Reusable across trials; not
// shareable between threads.
class NetworkSimulator {
public:
    NetworkSimulator(const Scenario& scenario, const ProjectionOperator& op);

    // Draws one realization of all N reports. Node i < B injects.
    void draw(Hypothesis truth, Engine& engine);
    TrialOutcome decide(Hypothesis truth) const;
    TrialOutcome run(Hypothesis truth, Engine& engine)
    {
        draw(truth, engine);
        return decide(truth);
    }

    // State of the last draw.
    std::span<const double> observation(std::size_t node) const { return {ys_.data() + node * m_, m_}; }
    const WhitenedBatch& whitened() const { return batch_; }
    const std::vector<bool>& byz_flags() const { return flags_; }

    const Scenario& scenario() const { return scenario_; }
    const ProjectionOperator& op() const { return op_; }

private:
    Scenario scenario_;
    const ProjectionOperator& op_;
    std::size_t m_;
    std::size_t p_;
    std::optional<CleanDetector> clean_;
    std::optional<MixtureSet> mixtures_;
    std::vector<bool> flags_;

    std::vector<double> u_;
    std::vector<double> w_;
    std::vector<double> ys_;
    WhitenedBatch batch_;
};

// One trial on its own substream. scenario must be validated.
TrialOutcome simulate_trial(const Scenario& scenario, const ProjectionOperator& op, Hypothesis truth, Engine& engine);

struct Interval {
    double estimate = 0.0;
    double half_width = 0.0;

    double lower() const { return estimate - half_width; }
    double upper() const { return estimate + half_width; }
};

// Wald interval p +- 1.96 sqrt(p (1 - p) / n).
Interval wald_interval(std::uint64_t errors, std::uint64_t n);

struct MonteCarloResult {
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    Interval pe_fc;
    double pf_fc = 0.0;
    double pd_fc = 0.0;
    std::optional<Interval> pe_ev;
    std::optional<double> pf_ev;
    std::optional<double> pd_ev;
    double wallclock = 0.0;  // seconds
    std::string interval_type = "wald";
};

// Called with (trials done, total) from the thread driving the run.
using ProgressFn = std::function<void(std::uint64_t, std::uint64_t)>;

struct SimulationOptions {
    unsigned workers = 1;
    ProgressFn progress;
};

inline constexpr std::uint64_t kMinTrials = 100;

// Fixed operator. Throws DomainError for trials < kMinTrials.
MonteCarloResult estimate_errors(const Scenario& scenario, const ProjectionOperator& op, std::uint64_t trials,
                                 const SimulationOptions& options = {});

// Draws a new phi from projection_stream(seed, b) for the b-th block of
// batch_size consecutive trials.
MonteCarloResult estimate_errors_fresh_projection(const Scenario& scenario, std::uint64_t trials,
                                                  std::uint64_t batch_size, const SimulationOptions& options = {});

// Mean and standard error of the compressed per-node observations seen by
// the eavesdropper, pooled over all nodes of `trials` network draws per
// hypothesis. H0 uses substreams [0, trials), H1 [trials, 2 trials).
struct ObservationMoments {
    Eigen::VectorXd mean_h0;
    Eigen::VectorXd mean_h1;
    Eigen::VectorXd se_h0;
    Eigen::VectorXd se_h1;
    std::uint64_t draws_per_hypothesis = 0;

    double difference_norm() const { return (mean_h1 - mean_h0).norm(); }
    // Standard error of the difference's norm under a zero mean difference.
    double difference_se() const { return std::sqrt((se_h0.array().square() + se_h1.array().square()).sum()); }
};

ObservationMoments eve_observation_moments(const Scenario& scenario, const ProjectionOperator& op,
                                           std::uint64_t trials);

// Closed-form P_E for the clean fusion rule on this operator: the exact
// Gaussian error for a deterministic signal and the chi-squared laws for a
// random one. NaN when noise is injected.
double closed_form_pe(const Scenario& scenario, const ProjectionOperator& op);

enum class SweepAxis { CompressionRatio, Nodes, Kappa, Fraction, ArtVariance };

SweepAxis parse_sweep_axis(const std::string& name);  // c | N | kappa | fraction | gamma_inv
std::string sweep_axis_name(SweepAxis axis);

struct SweepRow {
    double axis_value = 0.0;
    MonteCarloResult result;
    double pe_fc_theory = 0.0;
    double d_fc = 0.0;
    double d_ev = 0.0;
};

// One Monte Carlo run per grid value, in grid order. Every point draws phi
// from projection_stream(seed, 0) at its own M = max(1, round(c P)).
// Kappa, fraction and gamma_inv need an injection policy.
std::vector<SweepRow> sweep(const Scenario& scenario_template, SweepAxis axis, std::span<const double> grid,
                            std::uint64_t trials, const SimulationOptions& options = {});

// Returns the scenario with the axis set to value, revalidated.
Scenario apply_axis(Scenario scenario, SweepAxis axis, double value);

inline constexpr const char* kSweepCsvHeader =
    "axis_value,pe_fc_emp,pe_fc_ci,pe_fc_theory,pe_ev_emp,pe_ev_ci,d_fc,d_ev,trials,seed";

std::string sweep_csv(std::span<const SweepRow> rows);

}  // namespace ccd
