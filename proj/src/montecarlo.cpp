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

#include "ccd/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include <fmt/format.h>

#include "ccd/analytics.hpp"
#include "ccd/errors.hpp"
#include "ccd/kernels.hpp"

namespace ccd {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

enum : std::uint8_t { kFcError = 1, kEveError = 2, kFcSaysH1 = 4, kEveSaysH1 = 8 };

std::uint8_t encode(const TrialOutcome& o)
{
    std::uint8_t code = 0;
    if (o.fc.verdict != o.truth) code |= kFcError;
    if (o.fc.verdict == Hypothesis::H1) code |= kFcSaysH1;
    if (o.eve) {
        if (o.eve->verdict != o.truth) code |= kEveError;
        if (o.eve->verdict == Hypothesis::H1) code |= kEveSaysH1;
    }
    return code;
}

// Runs fn(block) for every block on up to `workers` threads. The calling
// thread takes part and is the only one that reports progress.
template <class Fn>
void parallel_blocks(std::uint64_t blocks, unsigned workers, const std::vector<std::uint64_t>& block_sizes, Fn fn,
                     const ProgressFn& progress, std::uint64_t total)
{
    std::atomic<std::uint64_t> next{0};
    std::atomic<std::uint64_t> done{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};

    auto loop = [&](bool reporter) {
        try {
            for (std::uint64_t b = next++; b < blocks && !failed; b = next++) {
                fn(b);
                const std::uint64_t d = done += block_sizes[b];
                if (reporter && progress) progress(d, total);
            }
        } catch (...) {
            if (!failed.exchange(true)) failure = std::current_exception();
        }
    };

    const unsigned extra = workers > 1 ? std::min<std::uint64_t>(workers, blocks) - 1 : 0;
    std::vector<std::thread> pool;
    pool.reserve(extra);
    for (unsigned w = 0; w < extra; ++w) pool.emplace_back(loop, false);
    loop(true);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    if (progress) progress(total, total);
}

MonteCarloResult aggregate(const std::vector<std::uint8_t>& codes, bool has_eve)
{
    std::uint64_t n[2] = {0, 0};
    std::uint64_t fc_h1[2] = {0, 0};
    std::uint64_t eve_h1[2] = {0, 0};
    std::uint64_t fc_err = 0;
    std::uint64_t eve_err = 0;
    for (std::uint64_t t = 0; t < codes.size(); ++t) {
        const int h = static_cast<int>(t % 2);
        const std::uint8_t c = codes[t];
        ++n[h];
        fc_h1[h] += (c & kFcSaysH1) ? 1 : 0;
        eve_h1[h] += (c & kEveSaysH1) ? 1 : 0;
        fc_err += (c & kFcError) ? 1 : 0;
        eve_err += (c & kEveError) ? 1 : 0;
    }
    MonteCarloResult r;
    r.trials = codes.size();
    r.pe_fc = wald_interval(fc_err, r.trials);
    r.pf_fc = static_cast<double>(fc_h1[0]) / static_cast<double>(n[0]);
    r.pd_fc = static_cast<double>(fc_h1[1]) / static_cast<double>(n[1]);
    if (has_eve) {
        r.pe_ev = wald_interval(eve_err, r.trials);
        r.pf_ev = static_cast<double>(eve_h1[0]) / static_cast<double>(n[0]);
        r.pd_ev = static_cast<double>(eve_h1[1]) / static_cast<double>(n[1]);
    }
    return r;
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void check_trials(std::uint64_t trials)
{
    if (trials < kMinTrials)
        throw DomainError("at least " + std::to_string(kMinTrials) + " trials are required, got " +
                          std::to_string(trials));
}

}  // namespace

NetworkSimulator::NetworkSimulator(const Scenario& scenario, const ProjectionOperator& op)
    : scenario_(validate_scenario(scenario)),
      op_(op),
      m_(op.rows()),
      p_(op.cols()),
      flags_(scenario_.num_nodes, false),
      u_(p_),
      w_(p_),
      ys_(scenario_.num_nodes * m_),
      batch_(scenario_.num_nodes, m_)
{
    if (p_ != scenario_.signal.ambient_dim || m_ != scenario_.compressed_dim)
        throw DimensionError("projection is " + std::to_string(m_) + "x" + std::to_string(p_) + ", scenario needs " +
                             std::to_string(scenario_.compressed_dim) + "x" +
                             std::to_string(scenario_.signal.ambient_dim));
    if (scenario_.injection) {
        mixtures_.emplace(build_mixtures(scenario_, op_));
        std::fill_n(flags_.begin(), scenario_.derived.num_injecting, true);
    } else {
        clean_.emplace(scenario_.signal, op_, scenario_.num_nodes, scenario_.priors);
    }
}

void NetworkSimulator::draw(Hypothesis truth, Engine& engine)
{
    const SignalModel& s = scenario_.signal;
    const double noise_sd = std::sqrt(s.noise_variance);
    const double signal_sd = std::sqrt(s.signal_variance);
    const std::span<double> u(u_);
    const std::span<double> w(w_);
    const bool h1 = truth == Hypothesis::H1;
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (std::size_t i = 0; i < scenario_.num_nodes; ++i) {
        fill_normal(engine, u, 0.0, noise_sd);
        if (h1) {
            if (s.signal_variance > 0.0) {
                fill_normal(engine, w, 0.0, signal_sd);
                for (std::size_t k = 0; k < p_; ++k) u_[k] += s.mean[static_cast<Eigen::Index>(k)] + w_[k];
            } else {
                for (std::size_t k = 0; k < p_; ++k) u_[k] += s.mean[static_cast<Eigen::Index>(k)];
            }
        }
        if (flags_[i]) {
            const InjectionPolicy& p = *scenario_.injection;
            const double plus = h1 ? p.p11 : p.p10;
            const double minus = h1 ? p.p21 : p.p20;
            const double draw = unit(engine);
            const double sign = draw < plus ? 1.0 : (draw < plus + minus ? -1.0 : 0.0);
            if (sign != 0.0) {
                if (p.art_variance > 0.0) {
                    fill_normal(engine, w, 0.0, std::sqrt(p.art_variance));
                } else {
                    std::fill(w_.begin(), w_.end(), 0.0);
                }
                for (std::size_t k = 0; k < p_; ++k)
                    u_[k] += sign * (p.kappa * s.mean[static_cast<Eigen::Index>(k)] + w_[k]);
            }
        }
        const std::span<double> y(ys_.data() + i * m_, m_);
        op_.apply(u, y);
        op_.whiten(y, batch_.node(i));
    }
}

TrialOutcome NetworkSimulator::decide(Hypothesis truth) const
{
    TrialOutcome out;
    out.truth = truth;
    if (mixtures_) {
        out.fc = fc_decide_with_byzantines(batch_, flags_, *mixtures_, scenario_.priors);
        out.eve = eve_decide(batch_, *mixtures_, scenario_.priors);
    } else {
        out.fc = clean_->decide(batch_);
    }
    return out;
}

TrialOutcome simulate_trial(const Scenario& scenario, const ProjectionOperator& op, Hypothesis truth, Engine& engine)
{
    NetworkSimulator sim(scenario, op);
    return sim.run(truth, engine);
}

Interval wald_interval(std::uint64_t errors, std::uint64_t n)
{
    if (n == 0) return {kNaN, kNaN};
    const double p = static_cast<double>(errors) / static_cast<double>(n);
    return {p, 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n))};
}

MonteCarloResult estimate_errors(const Scenario& scenario, const ProjectionOperator& op, std::uint64_t trials,
                                 const SimulationOptions& options)
{
    check_trials(trials);
    const auto start = std::chrono::steady_clock::now();
    const Scenario sc = validate_scenario(scenario);

    constexpr std::uint64_t kBlock = 1024;
    const std::uint64_t blocks = (trials + kBlock - 1) / kBlock;
    std::vector<std::uint64_t> sizes(blocks);
    for (std::uint64_t b = 0; b < blocks; ++b) sizes[b] = std::min(kBlock, trials - b * kBlock);

    const unsigned workers = std::max(1u, options.workers);
    std::vector<std::uint8_t> codes(trials);
    auto body = [&](std::uint64_t b) {
        NetworkSimulator sim(sc, op);
        for (std::uint64_t t = b * kBlock; t < b * kBlock + sizes[b]; ++t) {
            Engine engine = make_engine({sc.seed, t});
            codes[t] = encode(sim.run(trial_hypothesis(t), engine));
        }
    };
    parallel_blocks(blocks, workers, sizes, body, options.progress, trials);

    MonteCarloResult r = aggregate(codes, sc.injection.has_value());
    r.seed = sc.seed;
    r.wallclock = seconds_since(start);
    return r;
}

MonteCarloResult estimate_errors_fresh_projection(const Scenario& scenario, std::uint64_t trials,
                                                  std::uint64_t batch_size, const SimulationOptions& options)
{
    check_trials(trials);
    if (batch_size == 0) throw DomainError("projection batch size must be positive");
    const auto start = std::chrono::steady_clock::now();
    const Scenario sc = validate_scenario(scenario);

    const std::uint64_t blocks = (trials + batch_size - 1) / batch_size;
    std::vector<std::uint64_t> sizes(blocks);
    for (std::uint64_t b = 0; b < blocks; ++b) sizes[b] = std::min(batch_size, trials - b * batch_size);

    std::vector<std::uint8_t> codes(trials);
    auto body = [&](std::uint64_t b) {
        const ProjectionOperator op =
            gen_projection(sc.compressed_dim, sc.signal.ambient_dim, projection_stream(sc.seed, b));
        NetworkSimulator sim(sc, op);
        for (std::uint64_t t = b * batch_size; t < b * batch_size + sizes[b]; ++t) {
            Engine engine = make_engine({sc.seed, t});
            codes[t] = encode(sim.run(trial_hypothesis(t), engine));
        }
    };
    parallel_blocks(blocks, std::max(1u, options.workers), sizes, body, options.progress, trials);

    MonteCarloResult r = aggregate(codes, sc.injection.has_value());
    r.seed = sc.seed;
    r.wallclock = seconds_since(start);
    return r;
}

ObservationMoments eve_observation_moments(const Scenario& scenario, const ProjectionOperator& op,
                                           std::uint64_t trials)
{
    if (trials < 2) throw DomainError("moment estimation needs at least two trials per hypothesis");
    const Scenario sc = validate_scenario(scenario);
    NetworkSimulator sim(sc, op);
    const auto m = static_cast<Eigen::Index>(op.rows());

    ObservationMoments out;
    out.draws_per_hypothesis = trials * sc.num_nodes;
    const double n = static_cast<double>(out.draws_per_hypothesis);

    for (int h = 0; h < 2; ++h) {
        Eigen::VectorXd mean = Eigen::VectorXd::Zero(m);
        Eigen::VectorXd m2 = Eigen::VectorXd::Zero(m);
        double count = 0.0;
        const Hypothesis truth = h == 0 ? Hypothesis::H0 : Hypothesis::H1;
        for (std::uint64_t t = 0; t < trials; ++t) {
            Engine engine = make_engine({sc.seed, h * trials + t});
            sim.draw(truth, engine);
            for (std::size_t i = 0; i < sc.num_nodes; ++i) {
                const Eigen::Map<const Eigen::VectorXd> y(sim.observation(i).data(), m);
                count += 1.0;
                const Eigen::VectorXd delta = y - mean;
                mean += delta / count;
                m2 += delta.cwiseProduct(y - mean);
            }
        }
        Eigen::VectorXd se = (m2 / (n - 1.0) / n).cwiseSqrt();
        (h == 0 ? out.mean_h0 : out.mean_h1) = mean;
        (h == 0 ? out.se_h0 : out.se_h1) = se;
    }
    return out;
}

double closed_form_pe(const Scenario& scenario, const ProjectionOperator& op)
{
    if (scenario.injection) return kNaN;
    const SignalModel& s = scenario.signal;
    const double energy = op.projected_energy(s.mean);
    const std::size_t n = scenario.num_nodes;
    const Priors& pri = scenario.priors;
    if (!s.deterministic()) return pe_random_exact(s, op.rows(), n, energy, pri).pe;

    const double d = std::sqrt(static_cast<double>(n) * energy / s.noise_variance);
    const double lr = pri.log_ratio();
    if (d == 0.0) return lr < 0.0 ? pri.h0 : pri.h1;
    return pri.h0 * q_function(d / 2.0 + lr / d) + pri.h1 * q_function(d / 2.0 - lr / d);
}

SweepAxis parse_sweep_axis(const std::string& name)
{
    if (name == "c") return SweepAxis::CompressionRatio;
    if (name == "N") return SweepAxis::Nodes;
    if (name == "kappa") return SweepAxis::Kappa;
    if (name == "fraction") return SweepAxis::Fraction;
    if (name == "gamma_inv") return SweepAxis::ArtVariance;
    throw DomainError("unknown sweep axis '" + name + "' (expected c, N, kappa, fraction or gamma_inv)");
}

std::string sweep_axis_name(SweepAxis axis)
{
    switch (axis) {
    case SweepAxis::CompressionRatio: return "c";
    case SweepAxis::Nodes: return "N";
    case SweepAxis::Kappa: return "kappa";
    case SweepAxis::Fraction: return "fraction";
    case SweepAxis::ArtVariance: return "gamma_inv";
    }
    return "?";
}

Scenario apply_axis(Scenario scenario, SweepAxis axis, double value)
{
    if (!std::isfinite(value)) throw DomainError("sweep values must be finite");
    auto policy = [&]() -> InjectionPolicy& {
        if (!scenario.injection)
            throw DomainError("sweeping " + sweep_axis_name(axis) + " requires an [injection] section");
        return *scenario.injection;
    };
    switch (axis) {
    case SweepAxis::CompressionRatio: {
        if (!(value > 0.0 && value <= 1.0)) throw DomainError("compression ratio must lie in (0, 1]");
        const double p = static_cast<double>(scenario.signal.ambient_dim);
        scenario.compressed_dim = static_cast<std::size_t>(std::max(1.0, std::round(value * p)));
        break;
    }
    case SweepAxis::Nodes:
        if (!(value >= 1.0) || std::abs(value - std::round(value)) > 1e-9)
            throw DomainError("node counts must be positive integers");
        scenario.num_nodes = static_cast<std::size_t>(std::llround(value));
        break;
    case SweepAxis::Kappa: policy().kappa = value; break;
    case SweepAxis::Fraction: policy().fraction = value; break;
    case SweepAxis::ArtVariance: policy().art_variance = value; break;
    }
    return validate_scenario(std::move(scenario));
}

std::vector<SweepRow> sweep(const Scenario& scenario_template, SweepAxis axis, std::span<const double> grid,
                            std::uint64_t trials, const SimulationOptions& options)
{
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (const double value : grid) {
        const Scenario sc = apply_axis(scenario_template, axis, value);
        const ProjectionOperator op =
            gen_projection(sc.compressed_dim, sc.signal.ambient_dim, projection_stream(sc.seed, 0));

        SweepRow row;
        row.axis_value = value;
        row.result = estimate_errors(sc, op, trials, options);
        row.pe_fc_theory = closed_form_pe(sc, op);

        const SignalModel& s = sc.signal;
        const double c = sc.derived.compression_ratio;
        row.d_fc = kNaN;
        row.d_ev = kNaN;
        if (s.mean_norm2() > 0.0) {
            if (sc.injection) {
                const double sigma2 = s.signal_variance + s.noise_variance + sc.injection->art_variance;
                row.d_fc = deflection_fc(*sc.injection, c, s.mean_norm2(), sigma2);
                row.d_ev = deflection_ev(*sc.injection, c, s.mean_norm2(), sigma2);
            } else {
                row.d_fc = c * s.mean_norm2() / (s.signal_variance + s.noise_variance);
            }
        }
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows)
{
    std::string out = kSweepCsvHeader;
    out += '\n';
    for (const SweepRow& r : rows) {
        const MonteCarloResult& m = r.result;
        const double ev = m.pe_ev ? m.pe_ev->estimate : kNaN;
        const double ev_ci = m.pe_ev ? m.pe_ev->half_width : kNaN;
        out += fmt::format("{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{:.10g},{},{}\n", r.axis_value,
                           m.pe_fc.estimate, m.pe_fc.half_width, r.pe_fc_theory, ev, ev_ci, r.d_fc, r.d_ev, m.trials,
                           m.seed);
    }
    return out;
}

}  // namespace ccd
