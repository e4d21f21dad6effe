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

#include "ccd/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ccd/errors.hpp"
#include "ccd/secrecy.hpp"

namespace ccd {
namespace {

namespace pt = boost::property_tree;

std::string trim(std::string s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw ConfigError(key + ": expected a number, got '" + text + "'");
    }
    if (used != t.size()) throw ConfigError(key + ": expected a number, got '" + text + "'");
    return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos)
        throw ConfigError(key + ": expected a nonnegative integer, got '" + text + "'");
    try {
        return std::stoull(t);
    } catch (const std::exception&) {
        throw ConfigError(key + ": integer out of range: '" + text + "'");
    }
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) out.push_back(trim(item));
    return out;
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base)
{
    std::filesystem::path path(trim(p));
    return path.is_absolute() ? path : base / path;
}

// Section reader that remembers which keys were consumed.
class Section {
public:
    Section(const pt::ptree& root, std::string name) : name_(std::move(name))
    {
        if (auto child = root.get_child_optional(name_)) tree_ = &*child;
    }

    bool present() const { return tree_ != nullptr; }

    std::optional<std::string> raw(const std::string& key)
    {
        used_.insert(key);
        if (!tree_) return std::nullopt;
        auto v = tree_->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
        if (!v) return std::nullopt;
        return trim(*v);
    }

    double number(const std::string& key, double fallback)
    {
        auto v = raw(key);
        return v ? to_double(qualified(key), *v) : fallback;
    }
    std::optional<double> number(const std::string& key)
    {
        auto v = raw(key);
        if (!v) return std::nullopt;
        return to_double(qualified(key), *v);
    }
    std::uint64_t integer(const std::string& key, std::uint64_t fallback)
    {
        auto v = raw(key);
        return v ? to_uint(qualified(key), *v) : fallback;
    }
    std::string qualified(const std::string& key) const { return name_ + "." + key; }

    void reject_unknown() const
    {
        if (!tree_) return;
        for (const auto& [key, _] : *tree_)
            if (!used_.count(key)) throw ConfigError("unknown key '" + qualified(key) + "'");
    }

private:
    std::string name_;
    const pt::ptree* tree_ = nullptr;
    std::set<std::string> used_;
};

}  // namespace

Eigen::VectorXd parse_mean(const std::string& spec_text, std::size_t dim, const std::filesystem::path& base_dir)
{
    const std::string spec = trim(spec_text);
    const auto n = static_cast<Eigen::Index>(dim);
    if (starts_with(spec, "constant:")) return Eigen::VectorXd::Constant(n, to_double("signal.mean", spec.substr(9)));
    if (starts_with(spec, "energy:")) {
        const double e = to_double("signal.mean", spec.substr(7));
        if (e < 0.0) throw ConfigError("signal.mean: energy must be nonnegative");
        if (dim == 0) throw DimensionError("ambient_dim must be positive");
        return Eigen::VectorXd::Constant(n, std::sqrt(e / static_cast<double>(dim)));
    }
    std::vector<double> values;
    if (starts_with(spec, "file:")) {
        const auto path = resolve(spec.substr(5), base_dir);
        std::ifstream in(path);
        if (!in) throw ConfigError("signal.mean: cannot open '" + path.string() + "'");
        std::string token;
        while (in >> token) {
            for (const auto& part : split(token, ','))
                if (!part.empty()) values.push_back(to_double("signal.mean", part));
        }
    } else {
        for (const auto& part : split(spec, ',')) values.push_back(to_double("signal.mean", part));
    }
    Eigen::VectorXd mean(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) mean[static_cast<Eigen::Index>(i)] = values[i];
    return mean;
}

std::vector<double> parse_grid(const std::string& spec_text)
{
    const std::string spec = trim(spec_text);
    if (spec.empty()) throw ConfigError("empty grid");
    if (spec.find(':') != std::string::npos) {
        const auto parts = split(spec, ':');
        if (parts.size() != 3) throw ConfigError("grid '" + spec + "': expected lo:hi:n");
        const std::uint64_t n = to_uint("grid", parts[2]);
        if (n == 0) throw ConfigError("grid '" + spec + "': n must be positive");
        return linspace(to_double("grid", parts[0]), to_double("grid", parts[1]), n);
    }
    std::vector<double> out;
    for (const auto& part : split(spec, ',')) out.push_back(to_double("grid", part));
    return out;
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir)
{
    pt::ptree root;
    try {
        std::istringstream in(text);
        pt::read_ini(in, root);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    static const std::set<std::string> known = {"signal", "scenario", "injection", "analyze", "sweep", "design"};
    for (const auto& [name, child] : root) {
        if (!known.count(name)) {
            if (child.empty()) throw ConfigError("key '" + name + "' outside of any section");
            throw ConfigError("unknown section [" + name + "]");
        }
    }

    ExperimentConfig cfg;
    Scenario& sc = cfg.scenario;

    Section signal(root, "signal");
    if (!signal.present()) throw ConfigError("missing [signal] section");
    sc.signal.ambient_dim = signal.integer("ambient_dim", 0);
    sc.signal.signal_variance = signal.number("signal_variance", 0.0);
    sc.signal.noise_variance = signal.number("noise_variance", 1.0);
    const auto mean = signal.raw("mean");
    if (!mean) throw ConfigError("missing signal.mean");
    sc.signal.mean = parse_mean(*mean, sc.signal.ambient_dim, base_dir);
    signal.reject_unknown();

    Section scen(root, "scenario");
    const auto ratio = scen.number("compression_ratio");
    sc.compressed_dim = scen.integer("compressed_dim", 0);
    if (ratio) {
        if (sc.compressed_dim != 0) throw ConfigError("give either scenario.compressed_dim or compression_ratio");
        if (!(*ratio > 0.0 && *ratio <= 1.0)) throw ConfigError("scenario.compression_ratio must lie in (0, 1]");
        sc.compressed_dim = static_cast<std::size_t>(
            std::max(1.0, std::round(*ratio * static_cast<double>(sc.signal.ambient_dim))));
    }
    sc.num_nodes = scen.integer("num_nodes", 1);
    sc.priors.h0 = scen.number("prior_h0", 0.5);
    sc.priors.h1 = scen.number("prior_h1", 1.0 - sc.priors.h0);
    sc.seed = scen.integer("seed", 0);
    sc.trials = scen.integer("trials", 1000);
    cfg.projection_batch = scen.integer("projection_batch", 0);
    cfg.workers = static_cast<unsigned>(std::max<std::uint64_t>(1, scen.integer("workers", 1)));
    if (auto proj = scen.raw("projection")) {
        if (*proj == "random") {
        } else if (starts_with(*proj, "file:")) {
            cfg.projection_file = resolve(proj->substr(5), base_dir);
        } else {
            throw ConfigError("scenario.projection: expected 'random' or 'file:PATH'");
        }
    }
    scen.reject_unknown();

    Section inj(root, "injection");
    if (inj.present()) {
        InjectionPolicy p;
        p.fraction = inj.number("fraction", 0.0);
        p.p10 = inj.number("p10", 0.0);
        p.p20 = inj.number("p20", 0.0);
        p.p11 = inj.number("p11", 0.0);
        p.p21 = inj.number("p21", 0.0);
        p.art_variance = inj.number("gamma_inv", 0.0);
        const auto kappa = inj.raw("kappa");
        if (kappa && *kappa == "perfect") {
            p.kappa = perfect_secrecy_kappa(p.fraction, p.mean_shift());
        } else {
            p.kappa = kappa ? to_double("injection.kappa", *kappa) : 0.0;
        }
        inj.reject_unknown();
        sc.injection = p;
    }

    Section an(root, "analyze");
    cfg.eps = an.number("eps", cfg.eps);
    cfg.delta = an.number("delta", cfg.delta);
    an.reject_unknown();

    Section sw(root, "sweep");
    if (auto axis = sw.raw("axis")) cfg.sweep_axis = parse_sweep_axis(*axis);
    if (auto grid = sw.raw("grid")) cfg.sweep_grid = parse_grid(*grid);
    if (cfg.sweep_axis.has_value() != !cfg.sweep_grid.empty())
        throw ConfigError("[sweep] needs both axis and grid");
    sw.reject_unknown();

    Section de(root, "design");
    cfg.c_max = de.number("c_max", cfg.c_max);
    cfg.fraction_min = de.number("fraction_min", cfg.fraction_min);
    cfg.tau = de.number("tau", cfg.tau);
    cfg.grid_points = de.integer("grid_points", cfg.grid_points);
    if (cfg.grid_points == 0) throw ConfigError("design.grid_points must be positive");
    auto grid_or = [&](const char* key, std::vector<double> fallback) {
        auto v = de.raw(key);
        return v ? parse_grid(*v) : fallback;
    };
    const std::size_t g = cfg.grid_points;
    cfg.grids.c = grid_or("c_grid", linspace(cfg.c_max / static_cast<double>(g), cfg.c_max, g));
    cfg.grids.fraction = grid_or("fraction_grid", linspace(cfg.fraction_min, 1.0, g));
    cfg.grids.kappa = grid_or("kappa_grid", linspace(0.0, 5.0, g));
    cfg.grids.gamma_inv = grid_or("gamma_inv_grid", linspace(0.0, 10.0, g));
    de.reject_unknown();

    sc = validate_scenario(sc);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

}  // namespace ccd
