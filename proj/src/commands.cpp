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

#include "ccd/commands.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "ccd/analytics.hpp"
#include "ccd/errors.hpp"
#include "ccd/figures.hpp"

namespace ccd {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) { return fmt::format("{:.10g}", v); }

const InjectionPolicy& require_policy(const ExperimentConfig& cfg, const char* what)
{
    if (!cfg.scenario.injection) throw ConfigError(std::string(what) + " needs an [injection] section");
    return *cfg.scenario.injection;
}

}  // namespace

int exit_code_for(const std::exception& e)
{
    if (dynamic_cast<const InfeasibleError*>(&e)) return kExitInfeasible;
    if (dynamic_cast<const RankError*>(&e) || dynamic_cast<const SingularCovarianceError*>(&e)) return kExitNumeric;
    if (dynamic_cast<const Error*>(&e)) return kExitConfig;
    return kExitNumeric;
}

ProjectionOperator config_projection(const ExperimentConfig& cfg)
{
    const Scenario& sc = cfg.scenario;
    if (cfg.projection_file) {
        Eigen::MatrixXd phi = load_matrix(*cfg.projection_file);
        if (static_cast<std::size_t>(phi.rows()) != sc.compressed_dim ||
            static_cast<std::size_t>(phi.cols()) != sc.signal.ambient_dim)
            throw DimensionError(fmt::format("projection file is {}x{}, scenario needs {}x{}", phi.rows(), phi.cols(),
                                             sc.compressed_dim, sc.signal.ambient_dim));
        return ProjectionOperator::from_matrix(std::move(phi));
    }
    return gen_projection(sc.compressed_dim, sc.signal.ambient_dim, projection_stream(sc.seed, 0));
}

std::string AnalyzeOutput::report() const
{
    std::string out;
    for (const auto& [k, v] : entries) out += k + "=" + v + "\n";
    return out;
}

std::string AnalyzeOutput::csv() const
{
    std::string out = "quantity,value\n";
    for (const auto& [k, v] : entries) {
        if (v.find_first_of(",\"\n ") != std::string::npos) {
            std::string quoted = "\"";
            for (const char ch : v) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
            out += k + "," + quoted + "\"\n";
        } else {
            out += k + "," + v + "\n";
        }
    }
    return out;
}

const std::string& AnalyzeOutput::get(const std::string& key) const
{
    for (const auto& [k, v] : entries)
        if (k == key) return v;
    throw std::out_of_range("no entry '" + key + "' in analyze output");
}

AnalyzeOutput cmd_analyze(const ExperimentConfig& cfg)
{
    const Scenario& sc = cfg.scenario;
    const SignalModel& s = sc.signal;
    const ProjectionOperator op = config_projection(cfg);
    const double c = sc.derived.compression_ratio;
    const std::size_t n = sc.num_nodes;
    const double energy = op.projected_energy(s.mean);
    const double mean_norm2 = s.mean_norm2();

    AnalyzeOutput out;
    auto put = [&](const std::string& k, const std::string& v) { out.entries.emplace_back(k, v); };
    auto put_num = [&](const std::string& k, double v) { put(k, num(v)); };

    put("command", "analyze");
    put("model", s.deterministic() ? "deterministic" : "random");
    put_num("ambient_dim", static_cast<double>(s.ambient_dim));
    put_num("compressed_dim", static_cast<double>(sc.compressed_dim));
    put_num("compression_ratio", c);
    put_num("num_nodes", static_cast<double>(n));
    put_num("seed", static_cast<double>(sc.seed));
    put_num("mean_norm2", mean_norm2);
    put_num("projector_energy", energy);
    if (mean_norm2 > 0.0) put_num("embedding_distortion", embedding_distortion(op, s.mean));

    if (s.deterministic()) {
        const double snr = mean_norm2 / s.noise_variance;
        put_num("snr", snr);
        put_num("pe_exact", pe_deterministic_exact(energy, s.noise_variance, n));
        put_num("pe_approx", pe_deterministic_approx(c, n, snr));
        const ErrorBounds b = pe_deterministic_bounds(c, n, snr, cfg.eps);
        put_num("eps", cfg.eps);
        put_num("pe_lower", b.lower);
        put_num("pe_upper", b.upper);
        put_num("pe_chernoff", pe_deterministic_chernoff(c, n, snr));
        if (snr > 0.0 && cfg.delta > 0.0 && cfg.delta < 0.5) {
            put_num("delta", cfg.delta);
            put_num("nodes_required", static_cast<double>(nodes_required(c, snr, cfg.delta)));
        }
    } else {
        put_num("variance_ratio", s.variance_ratio());
        const StatisticLaw law = test_stat_distribution(s, sc.compressed_dim, n, energy);
        put_num("law_dof", static_cast<double>(law.h1.dof));
        put_num("law_h1_noncentrality", law.h1.noncentrality);
        put_num("law_h0_noncentrality", h0_noncentrality(s, n, energy));
        put_num("pe_exact", pe_random_exact(s, sc.compressed_dim, n, energy, sc.priors).pe);
        const RandomErrorReport r =
            pe_random_approx(c, n, s.ambient_dim, mean_norm2, s.signal_variance, s.noise_variance);
        put_num("tau0", r.tau0);
        put_num("tau1", r.tau1);
        put_num("pe_approx", r.pe);
        put_num("pf_approx", r.pf);
        put_num("pd_approx", r.pd);
        put_num("pe_chernoff", r.tau0 > 0.0 && r.tau1 > 0.0 ? pe_random_chernoff(c, n, r.tau0, r.tau1) : kNaN);
        if (mean_norm2 == 0.0) {
            put("detector", "energy");
            put("note", "mean is zero: the test reduces to an energy detector on sum_i ||P u_i||^2");
        }
    }

    if (sc.injection) {
        const InjectionPolicy& p = *sc.injection;
        put_num("fraction", p.fraction);
        put_num("num_injecting", static_cast<double>(sc.derived.num_injecting));
        put_num("kappa", p.kappa);
        put_num("gamma_inv", p.art_variance);
        const double sigma2 = s.signal_variance + s.noise_variance + p.art_variance;
        const double secrecy = p.fraction * p.mean_shift() * p.kappa;
        put("perfect_secrecy", std::abs(secrecy - 1.0) <= 1e-12 ? "true" : "false");
        if (mean_norm2 > 0.0) {
            const DeflectionReport d = deflection_report(p, c, mean_norm2, sigma2);
            put_num("p_b", d.p_b);
            put_num("p_t", d.p_t);
            put_num("p_t_eve", d.p_t_eve);
            put_num("sigma2", d.sigma2);
            put_num("r_b", d.r_b);
            put_num("d_clean", d.d_clean);
            put_num("d_tilde", d.d_tilde);
            put_num("d_tilde_exact", deflection_tilde_exact(p, energy, sigma2));
            put_num("d_fc", d.d_fc);
            put_num("d_ev", d.d_ev);
        } else {
            put("deflection", "undefined for mu = 0");
        }
    }
    return out;
}

std::string cmd_simulate(const ExperimentConfig& cfg, const ProgressFn& progress)
{
    const Scenario& sc = cfg.scenario;
    const SimulationOptions options{cfg.workers, progress};
    if (cfg.sweep_axis) {
        const auto rows = sweep(sc, *cfg.sweep_axis, cfg.sweep_grid, sc.trials, options);
        return sweep_csv(rows);
    }

    SweepRow row;
    row.axis_value = sc.derived.compression_ratio;
    const SignalModel& s = sc.signal;
    if (cfg.projection_batch > 0) {
        row.result = estimate_errors_fresh_projection(sc, sc.trials, cfg.projection_batch, options);
        const double c = sc.derived.compression_ratio;
        if (sc.injection) {
            row.pe_fc_theory = kNaN;
        } else if (s.deterministic()) {
            row.pe_fc_theory = pe_deterministic_approx(c, sc.num_nodes, s.mean_norm2() / s.noise_variance);
        } else {
            row.pe_fc_theory =
                pe_random_approx(c, sc.num_nodes, s.ambient_dim, s.mean_norm2(), s.signal_variance, s.noise_variance)
                    .pe;
        }
    } else {
        const ProjectionOperator op = config_projection(cfg);
        row.result = estimate_errors(sc, op, sc.trials, options);
        row.pe_fc_theory = closed_form_pe(sc, op);
    }
    row.d_fc = kNaN;
    row.d_ev = kNaN;
    if (sc.injection && s.mean_norm2() > 0.0) {
        const double sigma2 = s.signal_variance + s.noise_variance + sc.injection->art_variance;
        row.d_fc = deflection_fc(*sc.injection, sc.derived.compression_ratio, s.mean_norm2(), sigma2);
        row.d_ev = deflection_ev(*sc.injection, sc.derived.compression_ratio, s.mean_norm2(), sigma2);
    }
    const SweepRow rows[] = {row};
    return sweep_csv(rows);
}

DesignMode parse_design_mode(const std::string& name)
{
    if (name == "perfect") return DesignMode::Perfect;
    if (name == "constrained") return DesignMode::Constrained;
    throw ConfigError("unknown design mode '" + name + "' (expected perfect or constrained)");
}

DesignSolution cmd_design(const ExperimentConfig& cfg, DesignMode mode)
{
    const InjectionPolicy& p = require_policy(cfg, "design");
    const SignalModel& s = cfg.scenario.signal;
    const double base = s.signal_variance + s.noise_variance;
    if (mode == DesignMode::Perfect)
        return optimize_perfect(cfg.c_max, cfg.fraction_min, p, s.mean_norm2(), base, cfg.grid_points);
    return optimize_constrained(cfg.tau, cfg.grids, p, s.mean_norm2(), base);
}

std::string design_report(const DesignSolution& s)
{
    return fmt::format(
        "regime={}\nc_star={:.10g}\nfraction_star={:.10g}\nkappa_star={:.10g}\nnoise_variance_star={:.10g}\n"
        "d_fc_star={:.10g}\nd_ev_star={:.10g}\nfallback={}\n",
        regime_name(s.regime), s.c_star, s.fraction_star, s.kappa_star, s.noise_variance_star, s.d_fc_star,
        s.d_ev_star, s.fallback ? "true" : "false");
}

std::string cmd_figure(const std::string& id, const std::vector<std::string>& overrides, bool describe)
{
    FigureSpec spec = figure_spec(id);
    apply_overrides(spec, overrides);
    if (describe) return describe_figure(spec);
    return table_csv(evaluate_figure(spec));
}

}  // namespace ccd
