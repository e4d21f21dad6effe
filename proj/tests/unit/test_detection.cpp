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
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "ccd/detection.hpp"
#include "ccd/errors.hpp"
#include "support.hpp"

namespace ccd {
namespace {

// Direct multivariate normal log-density, independent of the whitening path.
double log_normal_pdf(const Eigen::VectorXd& y, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov)
{
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
    const Eigen::VectorXd d = y - mean;
    const double quad = d.dot(ldlt.solve(d));
    const double logdet = ldlt.vectorD().array().log().sum();
    return -0.5 * (static_cast<double>(y.size()) * std::log(2 * std::numbers::pi) + logdet + quad);
}

// log sum_k w_k N(y; m_k, s_k C) summed in long double without max-shifting.
double mixture_oracle(const Eigen::VectorXd& y, const GaussianMixture& mix, const Eigen::MatrixXd& base)
{
    long double total = 0.0L;
    for (std::size_t k = 0; k < mix.components(); ++k) {
        if (mix.weights()[k] == 0.0) continue;
        total += static_cast<long double>(mix.weights()[k]) *
                 std::exp(static_cast<long double>(log_normal_pdf(y, mix.means()[k], mix.scales()[k] * base)));
    }
    return static_cast<double>(std::log(total));
}

std::vector<Eigen::VectorXd> columns(const Eigen::MatrixXd& m)
{
    std::vector<Eigen::VectorXd> out;
    for (Eigen::Index j = 0; j < m.cols(); ++j) out.push_back(m.col(j));
    return out;
}

TEST(Decision, TiesGoToH0)
{
    EXPECT_EQ(decide(1.0, 1.0).verdict, Hypothesis::H0);
    EXPECT_EQ(decide(std::nextafter(1.0, 2.0), 1.0).verdict, Hypothesis::H1);
    EXPECT_EQ(decide(0.0, 1.0).verdict, Hypothesis::H0);
}

TEST(Compress, RowSelection)
{
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(3, 6);
    for (int i = 0; i < 3; ++i) phi(i, i) = 1.0;
    const auto op = ProjectionOperator::from_matrix(phi);
    const Eigen::VectorXd u = test::gaussian_vector(6, 1);
    EXPECT_EQ(compress(op, u), u.head(3));
    EXPECT_EQ(compress(op, Eigen::VectorXd::Zero(6)), Eigen::VectorXd::Zero(3));
    EXPECT_THROW(compress(op, Eigen::VectorXd::Zero(5)), DimensionError);
}

TEST(Compress, MatchesDenseProduct)
{
    const auto op = gen_projection(17, 43, RngContract{3, 3});
    const Eigen::VectorXd u = test::gaussian_vector(43, 8);
    const Eigen::VectorXd direct = op.phi() * u;
    EXPECT_NEAR(compress(op, u).squaredNorm(), direct.squaredNorm(), 1e-12 * direct.squaredNorm());
}

TEST(Deterministic, StatisticExamples)
{
    const auto op = gen_projection(5, 12, RngContract{1, 2});
    const Eigen::VectorXd s = test::gaussian_vector(12, 3);
    const std::vector<Eigen::VectorXd> zeros(3, Eigen::VectorXd::Zero(5));
    EXPECT_EQ(fc_statistic_deterministic(zeros, op, s), 0.0);

    const std::vector<Eigen::VectorXd> clean(4, op.phi() * s);
    const double energy = s.dot(op.projector() * s);
    EXPECT_NEAR(fc_statistic_deterministic(clean, op, s), 4.0 * energy, 1e-10 * energy);

    const auto id = ProjectionOperator::from_matrix(Eigen::MatrixXd::Identity(4, 4));
    const Eigen::VectorXd u = test::gaussian_vector(4, 9), s4 = test::gaussian_vector(4, 10);
    const std::vector<Eigen::VectorXd> one = {u};
    EXPECT_NEAR(fc_statistic_deterministic(one, id, s4), u.dot(s4), 1e-12);
}

TEST(Deterministic, ThresholdExamples)
{
    const auto op = gen_projection(6, 20, RngContract{2, 2});
    EXPECT_EQ(fc_threshold_deterministic(op, Eigen::VectorXd::Zero(20), 5), 0.0);
    const Eigen::VectorXd s = test::gaussian_vector(20, 1);
    const double direct = 2.5 * s.dot(op.phi().transpose() * (op.phi() * op.phi().transpose()).inverse() * op.phi() * s);
    EXPECT_NEAR(fc_threshold_deterministic(op, s, 5), direct, 1e-10 * direct);

    const auto id = ProjectionOperator::from_matrix(Eigen::MatrixXd::Identity(20, 20));
    EXPECT_NEAR(fc_threshold_deterministic(id, s, 3), 1.5 * s.squaredNorm(), 1e-10 * s.squaredNorm());

    Priors pri{0.7, 0.3};
    EXPECT_NEAR(fc_threshold_deterministic(op, s, 5, 2.0, pri) - fc_threshold_deterministic(op, s, 5),
                2.0 * std::log(0.7 / 0.3), 1e-10);
}

TEST(Deterministic, StatisticMomentsUnderH0)
{
    const Scenario sc = test::make_scenario(30, 8, 4, test::gaussian_vector(30, 2), 0.0, 2.0);
    const auto op = gen_projection(8, 30, RngContract{5, 0});
    const Eigen::VectorXd& s = sc.signal.mean;
    Engine e = make_engine({77, 0});
    const int n = 20000;
    double sum = 0.0, sumsq = 0.0;
    std::vector<Eigen::VectorXd> ys(4, Eigen::VectorXd(8));
    std::vector<double> u(30);
    for (int t = 0; t < n; ++t) {
        for (auto& y : ys) {
            fill_normal(e, u, 0.0, std::sqrt(2.0));
            y = op.phi() * Eigen::Map<Eigen::VectorXd>(u.data(), 30);
        }
        const double v = fc_statistic_deterministic(ys, op, s);
        sum += v;
        sumsq += v * v;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    const double expected_var = 2.0 * 4 * op.projected_energy(s);
    EXPECT_NEAR(mean, 0.0, 3 * std::sqrt(expected_var / n));
    EXPECT_NEAR(var, expected_var, 3 * expected_var * std::sqrt(2.0 / n));
}

SignalModel random_model(Eigen::VectorXd mean, double a, double b)
{
    SignalModel m;
    m.ambient_dim = static_cast<std::size_t>(mean.size());
    m.mean = std::move(mean);
    m.signal_variance = a;
    m.noise_variance = b;
    return m;
}

TEST(Random, ThresholdExamples)
{
    const auto op = gen_projection(50, 100, RngContract{1, 0});
    const SignalModel m = random_model(Eigen::VectorXd::Zero(100), 1.0, 20.0);
    EXPECT_NEAR(fc_threshold_random(m, 50, 50, op), 21.0 * 2500.0 * std::log(1.05), 1e-9);
    EXPECT_NEAR(fc_threshold_random(m, 50, 1, op), 21.0 * 50.0 * std::log(1.05), 1e-9);

    const SignalModel shifted = random_model(test::gaussian_vector(100, 3), 1.0, 20.0);
    EXPECT_NEAR(fc_threshold_random(shifted, 50, 50, op) - fc_threshold_random(m, 50, 50, op),
                50.0 * op.projected_energy(shifted.mean), 1e-8);
}

TEST(Random, StatisticReducesToEnergyDetector)
{
    const auto op = gen_projection(4, 9, RngContract{6, 0});
    const SignalModel m = random_model(Eigen::VectorXd::Zero(9), 2.0, 5.0);
    const auto ys = columns(test::gaussian_matrix(4, 3, 1));
    double energy = 0.0;
    for (const auto& y : ys) energy += y.dot(op.gram_inverse() * y);
    EXPECT_NEAR(fc_statistic_random(ys, op, m), 0.4 * energy, 1e-12 * energy);
    const std::vector<Eigen::VectorXd> zeros(3, Eigen::VectorXd::Zero(4));
    EXPECT_EQ(fc_statistic_random(zeros, op, random_model(test::gaussian_vector(9, 1), 2.0, 5.0)), 0.0);
}

TEST(Random, TestIsAMonotoneTransformOfTheDensityRatio)
{
    const std::size_t M = 3, P = 7, N = 2;
    const auto op = gen_projection(M, P, RngContract{8, 0});
    const SignalModel m = random_model(test::gaussian_vector(P, 4), 1.5, 0.8);
    const double a = m.signal_variance, b = m.noise_variance;
    const Priors pri{0.4, 0.6};
    const Eigen::VectorXd phimu = op.phi() * m.mean;
    const double lambda = fc_threshold_random(m, M, N, op, pri);

    int agree = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto ys = columns(2.0 * test::gaussian_matrix(M, N, 1000 + t) +
                                (t % 2 ? 1.0 : 0.0) * phimu.replicate(1, N));
        double llr = 0.0;
        for (const auto& y : ys)
            llr += log_normal_pdf(y, phimu, (a + b) * op.gram()) - log_normal_pdf(y, Eigen::VectorXd::Zero(M), b * op.gram());
        const double stat = fc_statistic_random(ys, op, m);
        EXPECT_NEAR(2.0 * (a + b) * (llr - pri.log_ratio()), stat - lambda, 1e-8 * (std::abs(stat) + lambda));
        agree += (llr > pri.log_ratio()) == (stat > lambda);
    }
    EXPECT_EQ(agree, 1000);
}

TEST(Mixture, SingleComponentAtMean)
{
    const Eigen::MatrixXd A = test::gaussian_matrix(4, 4, 2);
    const Eigen::MatrixXd cov = A * A.transpose() + Eigen::MatrixXd::Identity(4, 4);
    const Eigen::VectorXd mean = test::gaussian_vector(4, 3);
    const GaussianMixture mix({1.0}, {mean}, cov);
    const double expected = -2.0 * std::log(2 * std::numbers::pi) - 0.5 * std::log(cov.determinant());
    EXPECT_NEAR(mixture_loglik(mean, mix), expected, 1e-12 * std::abs(expected));

    const Eigen::VectorXd y = test::gaussian_vector(4, 4);
    EXPECT_DOUBLE_EQ(mixture_loglik(y, mix), GaussianMixture({1.0, 0.0}, {mean, y}, cov).loglik(y));
    EXPECT_NEAR(mixture_loglik(y, GaussianMixture({0.5, 0.5}, {mean, mean}, cov)), mixture_loglik(y, mix), 1e-12);
}

TEST(Mixture, ThreeComponentsMatchExtendedPrecisionSum)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Eigen::MatrixXd A = test::gaussian_matrix(5, 5, seed);
        const Eigen::MatrixXd base = A * A.transpose() + 0.5 * Eigen::MatrixXd::Identity(5, 5);
        const GaussianMixture mix({0.2, 0.3, 0.5},
                                  {test::gaussian_vector(5, seed + 100), test::gaussian_vector(5, seed + 200),
                                   test::gaussian_vector(5, seed + 300)},
                                  {1.0, 2.5, 0.7}, base);
        const Eigen::VectorXd y = 1.5 * test::gaussian_vector(5, seed + 400);
        const double oracle = mixture_oracle(y, mix, base);
        EXPECT_NEAR(mix.loglik(y), oracle, 1e-10 * std::abs(oracle)) << seed;
    }
}

TEST(Mixture, FarTailStaysFinite)
{
    const GaussianMixture mix({0.5, 0.5}, {Eigen::VectorXd::Zero(2), Eigen::VectorXd::Constant(2, 1.0)},
                              Eigen::MatrixXd::Identity(2, 2));
    const double v = mix.loglik(Eigen::VectorXd::Constant(2, 200.0));
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_NEAR(v, std::log(0.5) - std::log(2 * std::numbers::pi) - 0.5 * 2 * 199.0 * 199.0 +
                       std::log1p(std::exp(-0.5 * 2 * (200.0 * 200.0 - 199.0 * 199.0))),
                1e-9 * std::abs(v));
}

TEST(Mixture, RejectsInvalidInput)
{
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
    const std::vector<Eigen::VectorXd> means(2, Eigen::VectorXd::Zero(2));
    EXPECT_THROW(GaussianMixture({0.5, 0.6}, means, I), ProbabilityError);
    EXPECT_THROW(GaussianMixture({1.5, -0.5}, means, I), ProbabilityError);
    Eigen::MatrixXd singular(2, 2);
    singular << 1, 1, 1, 1;
    EXPECT_THROW(GaussianMixture({0.5, 0.5}, means, singular), SingularCovarianceError);
    EXPECT_THROW(GaussianMixture({0.5, 0.5}, means, {1.0, 0.0}, I), SingularCovarianceError);
}

Scenario injection_scenario(double fraction, double kappa, double gamma, std::size_t N = 4)
{
    Scenario s = test::make_scenario(12, 4, N, test::gaussian_vector(12, 5), 0.5, 1.0);
    s.injection = test::figure_policy(fraction, kappa, gamma);
    return validate_scenario(s);
}

TEST(Mixtures, EavesdropperWeightsAreRescaled)
{
    const auto op = gen_projection(4, 12, RngContract{2, 0});
    const MixtureSet set = build_mixtures(injection_scenario(0.3, 1.0, 0.5), op);
    const auto& w = set.eve.h0.weights();
    EXPECT_NEAR(w[0], 0.24, 1e-15);
    EXPECT_NEAR(w[1], 0.03, 1e-15);
    EXPECT_NEAR(w[2], 0.73, 1e-15);

    const MixtureSet full = build_mixtures(injection_scenario(1.0, 1.0, 0.5), op);
    EXPECT_EQ(full.eve.h0.weights(), full.fc_byz.h0.weights());
    EXPECT_EQ(full.eve.h1.weights(), full.fc_byz.h1.weights());
}

TEST(Mixtures, ArtificialNoiseOnlyOnInjectedComponents)
{
    const auto op = gen_projection(4, 12, RngContract{2, 0});
    const MixtureSet set = build_mixtures(injection_scenario(0.3, 1.0, 0.5), op);
    EXPECT_EQ(set.fc_byz.h0.scales(), (std::vector<double>{1.5, 1.5, 1.0}));
    EXPECT_EQ(set.fc_byz.h1.scales(), (std::vector<double>{2.0, 2.0, 1.5}));
    EXPECT_EQ(set.clean.h0.scales(), (std::vector<double>{1.0}));
    EXPECT_EQ(set.clean.h1.scales(), (std::vector<double>{1.5}));
}

TEST(Mixtures, NoInjectionCollapsesToCleanDensity)
{
    const auto op = gen_projection(4, 12, RngContract{2, 0});
    const MixtureSet set = build_mixtures(injection_scenario(0.3, 0.0, 0.0), op);
    for (std::uint64_t s = 0; s < 10; ++s) {
        const Eigen::VectorXd y = test::gaussian_vector(4, s);
        EXPECT_NEAR(set.fc_byz.h0.loglik(y), set.clean.h0.loglik(y), 1e-12);
        EXPECT_NEAR(set.fc_byz.h1.loglik(y), set.clean.h1.loglik(y), 1e-12);
        EXPECT_NEAR(set.eve.h1.loglik(y), set.clean.h1.loglik(y), 1e-12);
    }
}

TEST(Mixtures, RequiresPolicy)
{
    const auto op = gen_projection(4, 12, RngContract{2, 0});
    EXPECT_THROW(build_mixtures(test::make_scenario(12, 4, 2, Eigen::VectorXd::Ones(12), 0.5, 1.0), op), DomainError);
}

// Brute force over full covariance matrices: sum of per-node log ratios.
double brute_force_llr(const std::vector<Eigen::VectorXd>& ys, const std::vector<bool>& flags, const Scenario& sc,
                       const ProjectionOperator& op, bool eve)
{
    const InjectionPolicy& p = *sc.injection;
    const Eigen::MatrixXd G = op.gram();
    const Eigen::VectorXd sig = op.phi() * sc.signal.mean;
    const Eigen::VectorXd off = p.kappa * sig;
    const double a = sc.signal.signal_variance, b = sc.signal.noise_variance, g = p.art_variance;
    const double f = eve ? p.fraction : 1.0;
    double llr = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const Eigen::VectorXd& y = ys[i];
        if (!eve && !flags[i]) {
            llr += log_normal_pdf(y, sig, (a + b) * G) - log_normal_pdf(y, Eigen::VectorXd::Zero(y.size()), b * G);
            continue;
        }
        auto density = [&](double w1, double w2, const Eigen::VectorXd& centre, double v) {
            return w1 * std::exp(log_normal_pdf(y, centre + off, (v + g) * G)) +
                   w2 * std::exp(log_normal_pdf(y, centre - off, (v + g) * G)) +
                   (1 - w1 - w2) * std::exp(log_normal_pdf(y, centre, v * G));
        };
        llr += std::log(density(f * p.p11, f * p.p21, sig, a + b)) -
               std::log(density(f * p.p10, f * p.p20, Eigen::VectorXd::Zero(y.size()), b));
    }
    return llr;
}

TEST(Byzantine, MatchesBruteForceDensityRatio)
{
    const Scenario sc = injection_scenario(0.5, 0.8, 0.3, 2);
    const auto op = gen_projection(4, 12, RngContract{4, 0});
    const MixtureSet mix = build_mixtures(sc, op);
    const std::vector<bool> flags = {true, false};
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto ys = columns(test::gaussian_matrix(4, 2, 900 + s) * 1.3);
        const Decision fc = fc_decide_with_byzantines(ys, op, flags, mix, sc.priors);
        const double oracle = brute_force_llr(ys, flags, sc, op, false);
        EXPECT_NEAR(fc.statistic, oracle, 1e-9 * (1 + std::abs(oracle)));
        EXPECT_EQ(fc.verdict, oracle > 0 ? Hypothesis::H1 : Hypothesis::H0);

        const Decision ev = eve_decide(ys, op, mix, sc.priors);
        const double eve_oracle = brute_force_llr(ys, flags, sc, op, true);
        EXPECT_NEAR(ev.statistic, eve_oracle, 1e-9 * (1 + std::abs(eve_oracle)));
    }
}

TEST(Byzantine, NoFlagsIsTheCleanTest)
{
    const Scenario sc = injection_scenario(0.5, 0.8, 0.3, 3);
    const auto op = gen_projection(4, 12, RngContract{4, 0});
    const MixtureSet mix = build_mixtures(sc, op);
    const CleanDetector clean(sc.signal, op, 3);
    const std::vector<bool> none(3, false);
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto ys = columns(test::gaussian_matrix(4, 3, 50 + s));
        const WhitenedBatch batch = whiten_all(op, ys);
        EXPECT_EQ(fc_decide_with_byzantines(batch, none, mix, sc.priors).verdict, clean.decide(batch).verdict);
    }
}

TEST(Byzantine, ZeroStatisticTiesToH0)
{
    const Scenario sc = injection_scenario(0.5, 0.0, 0.0, 2);
    const auto op = gen_projection(4, 12, RngContract{4, 0});
    const MixtureSet mix = build_mixtures(sc, op);
    WhitenedBatch empty(0, 4);
    const Decision d = fc_decide_with_byzantines(empty, {}, mix, sc.priors);
    EXPECT_EQ(d.statistic, 0.0);
    EXPECT_EQ(d.verdict, Hypothesis::H0);
}

TEST(Eavesdropper, KappaZeroIsTheCleanTestAndOrderFree)
{
    const Scenario sc = injection_scenario(0.3, 0.0, 0.0, 3);
    const auto op = gen_projection(4, 12, RngContract{4, 0});
    const MixtureSet mix = build_mixtures(sc, op);
    const CleanDetector clean(sc.signal, op, 3);
    for (std::uint64_t s = 0; s < 50; ++s) {
        auto ys = columns(test::gaussian_matrix(4, 3, 70 + s) + 0.5 * (op.phi() * sc.signal.mean).replicate(1, 3));
        const Decision d = eve_decide(ys, op, mix, sc.priors);
        EXPECT_EQ(d.verdict, clean.decide(whiten_all(op, ys)).verdict);
        std::swap(ys[0], ys[2]);
        EXPECT_NEAR(eve_decide(ys, op, mix, sc.priors).statistic, d.statistic, 1e-12 * (1 + std::abs(d.statistic)));
    }
}

TEST(Eavesdropper, VanishingFractionIsTheCleanTest)
{
    const Scenario sc = injection_scenario(1e-9, 2.0, 1.0, 3);
    const auto op = gen_projection(4, 12, RngContract{4, 0});
    const MixtureSet mix = build_mixtures(sc, op);
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto ys = columns(test::gaussian_matrix(4, 3, 170 + s));
        const WhitenedBatch batch = whiten_all(op, ys);
        double clean = 0.0;
        for (std::size_t i = 0; i < 3; ++i) clean += mix.clean.log_ratio_whitened(batch.node(i));
        EXPECT_NEAR(eve_decide(batch, mix, sc.priors).statistic, clean, 1e-6);
    }
}

}  // namespace
}  // namespace ccd
