#include <cmath>

#include "helpers.hpp"
#include "topamp/disorder.hpp"

using namespace topamp;

namespace {
EnsembleSpec ensemble(ModelParams p, double w, double omega, int n = 50, int reps = 100) {
    p.n_sites = n;
    EnsembleSpec s;
    s.base_params = p;
    s.strength = w;
    s.omega = omega;
    s.n_realizations = reps;
    s.seed = 2024;
    return s;
}
}  // namespace

TEST(Offsets, ZeroStrength) {
    const auto d = sample_offsets(ensemble(canonical_params(), 0.0, 0.0), 3);
    for (double x : d.offsets) EXPECT_EQ(x, 0.0);
}

TEST(Offsets, Deterministic) {
    const auto s = ensemble(canonical_params(), 0.3, 0.0);
    EXPECT_EQ(sample_offsets(s, 7).offsets, sample_offsets(s, 7).offsets);
    EXPECT_NE(sample_offsets(s, 7).offsets, sample_offsets(s, 8).offsets);
    auto t = s;
    t.seed = 99;
    EXPECT_NE(sample_offsets(s, 7).offsets, sample_offsets(t, 7).offsets);
}

TEST(Offsets, UniformMoments) {
    const double w = 0.2;
    const auto s = ensemble(canonical_params(), w, 0.0, 100, 100);
    double sum = 0, sq = 0;
    int n = 0;
    for (int r = 0; r < 100; ++r)
        for (double x : sample_offsets(s, r).offsets) {
            EXPECT_LE(std::abs(x), w);
            sum += x;
            sq += x * x;
            ++n;
        }
    const double mean = sum / n, var = sq / n - mean * mean;
    EXPECT_LT(std::abs(mean), 0.01);
    EXPECT_NEAR(var, w * w / 3, 0.05 * w * w / 3);
}

TEST(Offsets, CounterUniformRange) {
    for (std::uint64_t i = 0; i < 1000; ++i) {
        const double u = counter_uniform(1, i / 10, i % 10);
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
}

TEST(Ensemble, ThreadIndependent) {
    const auto s = ensemble(canonical_params(), 0.2, 0.0, 20, 16);
    const auto a = ensemble_spectrum(s, 1), b = ensemble_spectrum(s, 4);
    ASSERT_EQ(a.realizations.size(), 16u);
    for (size_t i = 0; i < 16; ++i) {
        EXPECT_EQ(a.realizations[i].realization, static_cast<int>(i));
        EXPECT_EQ(a.realizations[i].min_sv, b.realizations[i].min_sv);
    }
    EXPECT_EQ(a.mean_values, b.mean_values);
}

TEST(Ensemble, RegionThreeSplits) {
    ModelParams p;
    p.gamma = 1;
    const auto e3 = ensemble_spectrum(ensemble(p, 0.2, 0.5));
    EXPECT_GT(e3.mean_values(0), 1e-3);
    EXPECT_GT(e3.mean_values(1), 1e-3);
    const auto e0 = ensemble_spectrum(ensemble(p, 0.0, 0.5, 50, 1));
    EXPECT_GT(e3.mean_values(0), 10 * e0.mean_values(0));
    const auto e2 = ensemble_spectrum(ensemble(p, 0.2, 1.6));
    EXPECT_LT(e2.mean_values(0), 1e-3);
    EXPECT_GT(e2.mean_values(1), 1e-2);
}

TEST(Ensemble, TopologicalPinned) {
    for (double w : {-0.5, 0.0, 0.5}) {
        const auto e = ensemble_spectrum(ensemble(canonical_params(), 0.2, w));
        EXPECT_LT(e.mean_values(0), 1e-3) << w;
        EXPECT_GT(e.mean_values(1), 1e-2) << w;
    }
}

TEST(Ensemble, DoubleHatanoNelsonTwoPinned) {
    const auto e = ensemble_spectrum(ensemble(double_hatano_nelson_params(), 0.2, 0.0));
    EXPECT_LT(e.mean_values(0), 1e-3);
    EXPECT_LT(e.mean_values(1), 1e-3);
    EXPECT_GT(e.mean_values(2), 1e-2);
}

TEST(Ensemble, RejectsBadSpec) {
    auto s = ensemble(canonical_params(), -0.1, 0.0);
    EXPECT_THROW(ensemble_spectrum(s), ParameterError);
    s = ensemble(canonical_params(), 0.1, 0.0, 50, 0);
    EXPECT_THROW(ensemble_spectrum(s), ParameterError);
}

TEST(Splitting, TrivialGrowsLinearly) {
    ModelParams p;
    p.gamma = 0;
    p.n_sites = 50;
    const auto c = splitting_curve(p, 0.0, {0.0, 0.05, 0.1, 0.2}, 100, 5);
    EXPECT_LT(c.lowest_mean[0], 1e-6);
    EXPECT_GT(c.lowest_mean[1], 1e-3);
    for (size_t i = 1; i < 4; ++i) EXPECT_GT(c.lowest_mean[i], c.lowest_mean[i - 1]);
    const double r = c.lowest_mean[3] / c.lowest_mean[2];
    EXPECT_GT(r, 1.5);
    EXPECT_LT(r, 2.5);
}

TEST(Splitting, TopologicalResists) {
    ModelParams p;
    p.n_sites = 50;
    const auto c = splitting_curve(p, 0.0, {0.0, 0.1, 0.2, 0.8}, 100, 5);
    EXPECT_LT(c.lowest_mean[1], 1e-2);
    EXPECT_LT(c.lowest_mean[2], 1e-2);
    EXPECT_GT(c.lowest_mean[3], c.lowest_mean[2]);
}

TEST(Splitting, DoubleHatanoNelsonResilient) {
    ModelParams p = double_hatano_nelson_params();
    p.n_sites = 50;
    const auto c = splitting_curve(p, 0.0, {0.2, 0.6, 1.0}, 100, 5);
    for (size_t i = 0; i < 3; ++i) {
        EXPECT_LT(c.lowest_mean[i], 1e-2) << c.strengths[i];
        EXPECT_LT(c.second_mean[i], 1e-2) << c.strengths[i];
        EXPECT_EQ(c.n_ok[i], 100);
    }
}

TEST(Splitting, RequiresSortedStrengths) {
    EXPECT_THROW(splitting_curve(canonical_params(), 0.0, {0.2, 0.1}, 4, 1), ParameterError);
}
