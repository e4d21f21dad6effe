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

#include "ccd/figures.hpp"

#include <cmath>
#include <fmt/format.h>

#include "ccd/analytics.hpp"
#include "ccd/config.hpp"
#include "ccd/errors.hpp"
#include "ccd/secrecy.hpp"

namespace ccd {
namespace {

// Flip probabilities shared by Figs. 4 to 7.
const std::map<std::string, std::string> kPolicy = {
    {"p10", "0.8"}, {"p20", "0.1"}, {"p11", "0.1"}, {"p21", "0.8"}};

std::map<std::string, std::string> with_policy(std::map<std::string, std::string> params)
{
    params.insert(kPolicy.begin(), kPolicy.end());
    return params;
}

class Params {
public:
    explicit Params(const FigureSpec& spec) : spec_(spec) {}

    double num(const std::string& key) const
    {
        const std::string& v = get(key);
        try {
            std::size_t used = 0;
            const double d = std::stod(v, &used);
            if (used == v.size()) return d;
        } catch (const std::exception&) {
        }
        throw ConfigError("figure " + spec_.id + ": " + key + " must be a number, got '" + v + "'");
    }
    std::vector<double> grid(const std::string& key) const { return parse_grid(get(key)); }

    InjectionPolicy policy(double fraction, double kappa = 0.0, double gamma_inv = 0.0) const
    {
        InjectionPolicy p;
        p.fraction = fraction;
        p.p10 = num("p10");
        p.p20 = num("p20");
        p.p11 = num("p11");
        p.p21 = num("p21");
        p.kappa = kappa;
        p.art_variance = gamma_inv;
        validate_policy(p);
        return p;
    }

private:
    const std::string& get(const std::string& key) const
    {
        auto it = spec_.params.find(key);
        if (it == spec_.params.end()) throw ConfigError("figure " + spec_.id + " has no parameter '" + key + "'");
        return it->second;
    }
    const FigureSpec& spec_;
};

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

FigureTable collaboration_vs_compression(const Params& p)
{
    FigureTable t;
    t.columns = {"N", "c", "pe_approx", "pe_chernoff"};
    const double snr = p.num("snr");
    for (const double n : p.grid("N_grid")) {
        for (const double c : p.grid("c_grid")) {
            const auto nodes = static_cast<std::size_t>(std::llround(n));
            t.rows.push_back({n, c, pe_deterministic_approx(c, nodes, snr), pe_deterministic_chernoff(c, nodes, snr)});
        }
    }
    return t;
}

FigureTable random_signal_error(const Params& p)
{
    FigureTable t;
    t.columns = {"N", "c", "pe_approx", "tau0", "tau1"};
    const auto dim = static_cast<std::size_t>(std::llround(p.num("P")));
    const double a = p.num("signal_variance");
    const double b = p.num("noise_variance");
    const double e = p.num("mean_norm2");
    for (const double n : p.grid("N_grid")) {
        for (const double c : p.grid("c_grid")) {
            const auto r = pe_random_approx(c, static_cast<std::size_t>(std::llround(n)), dim, e, a, b);
            t.rows.push_back({n, c, r.pe, r.tau0, r.tau1});
        }
    }
    return t;
}

// Deflection surfaces are written in units where sigma^2 = 1, so
// ||mu||^2 = mean_snr.
FigureTable deflection_vs_c_kappa(const Params& p, bool eve)
{
    FigureTable t;
    t.columns = {"c", "kappa", eve ? "d_ev" : "d_fc"};
    const double snr = p.num("mean_snr");
    for (const double c : p.grid("c_grid")) {
        for (const double k : p.grid("kappa_grid")) {
            const InjectionPolicy pol = p.policy(p.num("fraction"), k);
            t.rows.push_back({c, k, eve ? deflection_ev(pol, c, snr, 1.0) : deflection_fc(pol, c, snr, 1.0)});
        }
    }
    return t;
}

FigureTable deflection_vs_fraction_kappa(const Params& p, bool eve)
{
    FigureTable t;
    t.columns = {"fraction", "kappa", eve ? "d_ev" : "d_fc"};
    const double c = p.num("c");
    const double snr = p.num("compressed_snr") / c;
    for (const double f : p.grid("fraction_grid")) {
        for (const double k : p.grid("kappa_grid")) {
            const InjectionPolicy pol = p.policy(f, k);
            t.rows.push_back({f, k, eve ? deflection_ev(pol, c, snr, 1.0) : deflection_fc(pol, c, snr, 1.0)});
        }
    }
    return t;
}

FigureTable perfect_secrecy_surface(const Params& p)
{
    FigureTable t;
    t.columns = {"fraction", "c", "d_fc"};
    const double snr = db_to_linear(p.num("mean_snr_db"));
    const InjectionPolicy pol = p.policy(1.0);
    for (const double f : p.grid("fraction_grid"))
        for (const double c : p.grid("c_grid"))
            t.rows.push_back({f, c, dfc_perfect(c, f, pol.mean_shift(), pol.spread(), snr)});
    return t;
}

FigureTable artificial_noise_variance(const Params& p)
{
    FigureTable t;
    t.columns = {"gamma_inv", "d_fc", "d_ev"};
    const double f = p.num("fraction");
    const double c = p.num("c");
    const double base = p.num("signal_variance") + p.num("noise_variance");
    const double e = p.num("mean_norm2");
    const double kappa = perfect_secrecy_kappa(f, p.policy(f).mean_shift());
    for (const double g : p.grid("gamma_inv_grid")) {
        const InjectionPolicy pol = p.policy(f, kappa, g);
        t.rows.push_back({g, deflection_fc(pol, c, e, base + g), deflection_ev(pol, c, e, base + g)});
    }
    return t;
}

}  // namespace

std::vector<std::string> figure_ids() { return {"2", "3a", "3b", "4a", "4b", "5a", "5b", "6", "7"}; }

FigureSpec figure_spec(const std::string& id)
{
    if (id == "2")
        return {id, "deterministic signal: P_E over (N, c) at SNR 3 dB",
                {{"snr", "2"}, {"N_grid", "1:20:20"}, {"c_grid", "0.05:1:20"}}};
    if (id == "3a" || id == "3b")
        return {id,
                id == "3a" ? "random signal, mu = 0: P_E over (N, c)" : "random signal, ||mu||^2 = 1e-3: P_E over (N, c)",
                {{"signal_variance", "1"},
                 {"noise_variance", "20"},
                 {"P", "100"},
                 {"mean_norm2", id == "3a" ? "0" : "1e-3"},
                 {"N_grid", "5:100:20"},
                 {"c_grid", "0.05:1:20"}}};
    if (id == "4a" || id == "4b")
        return {id, id == "4a" ? "D_FC over (c, kappa), f = 0.3" : "D_EV over (c, kappa), f = 0.3",
                with_policy({{"fraction", "0.3"}, {"mean_snr", "3"}, {"c_grid", "0.05:1:20"},
                             {"kappa_grid", "0:3:31"}})};
    if (id == "5a" || id == "5b")
        return {id, id == "5a" ? "D_FC over (f, kappa), c ||mu||^2 / sigma^2 = 3" : "D_EV over (f, kappa), c ||mu||^2 / sigma^2 = 3",
                with_policy({{"c", "1"}, {"compressed_snr", "3"}, {"fraction_grid", "0.05:1:20"},
                             {"kappa_grid", "0:3:31"}})};
    if (id == "6")
        return {id, "perfect secrecy: D_FC over (f, c) at ||mu||^2 / sigma^2 = 5 dB",
                with_policy({{"mean_snr_db", "5"}, {"fraction_grid", "0.1:1:19"}, {"c_grid", "0.1:1:10"}})};
    if (id == "7")
        return {id, "perfect secrecy: D_FC over artificial noise variance",
                with_policy({{"signal_variance", "1"},
                             {"noise_variance", "10"},
                             {"mean_norm2", "5"},
                             {"c", "0.2"},
                             {"fraction", "0.3"},
                             {"gamma_inv_grid", "0:20:21"}})};
    throw UnknownFigureError("unknown figure '" + id + "' (known: 2 3a 3b 4a 4b 5a 5b 6 7)");
}

void apply_overrides(FigureSpec& spec, const std::vector<std::string>& overrides)
{
    for (const std::string& o : overrides) {
        const auto eq = o.find('=');
        if (eq == std::string::npos) throw ConfigError("override '" + o + "': expected key=value");
        const std::string key = o.substr(0, eq);
        auto it = spec.params.find(key);
        if (it == spec.params.end()) throw ConfigError("figure " + spec.id + " has no parameter '" + key + "'");
        it->second = o.substr(eq + 1);
    }
}

std::string describe_figure(const FigureSpec& spec)
{
    std::string out = fmt::format("figure {}: {}\n", spec.id, spec.title);
    for (const auto& [k, v] : spec.params) out += fmt::format("  {} = {}\n", k, v);
    return out;
}

FigureTable evaluate_figure(const FigureSpec& spec)
{
    const Params p(spec);
    const std::string& id = spec.id;
    if (id == "2") return collaboration_vs_compression(p);
    if (id == "3a" || id == "3b") return random_signal_error(p);
    if (id == "4a" || id == "4b") return deflection_vs_c_kappa(p, id == "4b");
    if (id == "5a" || id == "5b") return deflection_vs_fraction_kappa(p, id == "5b");
    if (id == "6") return perfect_secrecy_surface(p);
    if (id == "7") return artificial_noise_variance(p);
    throw UnknownFigureError("unknown figure '" + id + "'");
}

std::string table_csv(const FigureTable& table)
{
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) out += (i ? "," : "") + table.columns[i];
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out += fmt::format("{}{:.10g}", i ? "," : "", row[i]);
        out += '\n';
    }
    return out;
}

}  // namespace ccd
