#include <cmath>

#include "helpers.hpp"
#include "topamp/greens.hpp"
#include "topamp/observables.hpp"

using namespace topamp;

namespace {
FiniteGreenOptions loose() {
    FiniteGreenOptions o;
    o.max_condition = 1e60;
    return o;
}
FiniteGreen fg(const ModelParams& p, double w) { return finite_green(build_dynamical_matrix(p), w, loose()); }
}  // namespace

TEST(Amplitude, NoLineCoupling) {
    ModelParams p;
    p.gamma = 0;
    p.n_sites = 6;
    const auto g = fg(p, 0.3);
    for (int j = 0; j < 6; ++j) {
        const auto a = output_amplitude(g, p, j, 0.3);
        EXPECT_TRUE(th::close(a.signal, j == 0 ? 1.0 : 0.0, 1e-14));
        EXPECT_TRUE(th::close(a.idler, 0.0, 1e-14));
    }
}

TEST(Amplitude, NoSqueezingNoIdler) {
    ModelParams p;
    p.g_s = p.g_c = 0;
    p.gamma = 3;
    const auto g = fg(p, 0.1);
    for (int j = 0; j < p.n_sites; ++j) EXPECT_EQ(output_amplitude(g, p, j, 0.1).idler, cplx(0));
}

TEST(Amplitude, IdlerMatchesAnomalousBlock) {
    const ModelParams p = canonical_params();
    const auto g = fg(p, 0.2);
    for (int j = 1; j < p.n_sites; ++j) {
        const auto a = output_amplitude(g, p, j, 0.2);
        EXPECT_NEAR(std::norm(a.idler), p.gamma * p.gamma * std::norm(g.anomalous(j, 0)),
                    1e-12 * std::max(1.0, std::norm(a.idler)));
    }
}

TEST(Gain, CanonicalValues) {
    const ModelParams p = canonical_params();
    const auto g = fg(p, 0.0);
    EXPECT_NEAR(gain(g, p, 1) / 16.0, 1.0, 1e-9);
    EXPECT_NEAR(gain(g, p, 8) / 262144.0, 1.0, 1e-9);
    EXPECT_NEAR(std::norm(output_amplitude(g, p, 8, 0.0).signal) / 262144.0, 1.0, 1e-6);
    EXPECT_THROW(gain(g, p, 0), ParameterError);
    EXPECT_THROW(gain(g, p, 12), ParameterError);
}

TEST(Gain, DecaysOffResonance) {
    const ModelParams p = canonical_params();
    for (double w : {-60.0, 60.0}) EXPECT_LT(gain(fg(p, w), p, 8), 1e-20);
}

TEST(Gain, ClosedFormAcrossFrequency) {
    const ModelParams p = canonical_params();
    for (double w = -3; w <= 3; w += 0.25) {
        const auto g = fg(p, w);
        for (int j : {1, 4, 8, 11}) {
            const double cf = gain_closed_form(p, j, w);
            EXPECT_NEAR(gain(g, p, j) / cf, 1.0, 1e-8) << "w=" << w << " j=" << j;
        }
    }
    ModelParams q;
    q.delta = 0.1;
    EXPECT_THROW(gain_closed_form(q, 3, 0.0), ParameterError);
}

TEST(Gain, SemiInfiniteMatchesClosedForm) {
    ModelParams p;
    p.gamma = 3;
    for (double w : {-0.5, 0.0, 0.8})
        for (int j : {1, 5, 9}) EXPECT_NEAR(gain_semi_infinite(p, j, w) / gain_closed_form(p, j, w), 1.0, 1e-9);
}

TEST(Noise, NoSqueezingNoPump) {
    ModelParams p;
    p.g_s = p.g_c = 0;
    p.pump = 0;
    p.gamma = 3;
    const auto g = fg(p, 0.2);
    const auto pt = added_noise(g, build_pump_matrix(p), p, 6);
    EXPECT_EQ(pt.n_amp, 0.0);
    EXPECT_EQ(semi_infinite_noise(p, 6, 0.2), 0.0);
}

TEST(Noise, CanonicalMinimumAtZero) {
    const ModelParams p = canonical_params();
    const auto pm = build_pump_matrix(p);
    const double at0 = added_noise(fg(p, 0.0), pm, p, 8).n_add;
    for (double w : {-1.0, -0.5, -0.1, 0.1, 0.5, 1.0}) EXPECT_GT(added_noise(fg(p, w), pm, p, 8).n_add, at0);
}

TEST(Noise, QuantumLimitApproachedNearCriticalLoss) {
    double prev = 1e9;
    for (double gamma : {3.0, 2.5, 2.2, 2.1}) {
        ModelParams p;
        p.gamma = gamma;
        const double n = added_noise(fg(p, 0.0), build_pump_matrix(p), p, 8).n_add;
        EXPECT_LT(n, prev);
        EXPECT_GE(n, 1.0 - 1e-9);
        prev = n;
    }
    EXPECT_LT(prev, 1.05);
}

TEST(Noise, SemiInfiniteAgreesInsideWindow) {
    const ModelParams p = canonical_params();
    const auto pm = build_pump_matrix(p);
    for (double w : {0.0, 0.3}) {
        const auto g = fg(p, w);
        double finite = 0;
        for (int l = 0; l < p.n_sites; ++l) finite += p.gamma * p.gamma * std::norm(g.anomalous(8, l));
        const double semi = p.gamma * p.gamma * semi_infinite_noise(p, 8, w);
        EXPECT_NEAR(semi / finite, 1.0, 0.05) << w;
        EXPECT_NEAR(added_noise(g, pm, p, 8).n_amp / finite, 1.0, 1e-9);
    }
}

TEST(Noise, CapAndUnderflowFlags) {
    AmplifierPoint a;
    a.n_add = 5e12;
    EXPECT_TRUE(a.capped());
    EXPECT_EQ(a.n_add_capped(), kNoiseCap);
    a.n_add = 3;
    EXPECT_FALSE(a.capped());
}

TEST(Quadrature, VacuumIsUnity) {
    ModelParams p = th::decoupled(2.0);
    p.n_sites = 5;
    const auto g = fg(p, 0.0);
    const auto pm = build_pump_matrix(p);
    for (int j = 0; j < 5; ++j)
        for (double th : {0.0, 0.4, 1.3}) {
            const auto q = quadrature_state(g, pm, p, j, th);
            EXPECT_NEAR(q.var_x, 1.0, 1e-12);
            EXPECT_NEAR(q.var_p, 1.0, 1e-12);
        }
}

TEST(Quadrature, CanonicalAngleScan) {
    const ModelParams p = canonical_params();
    const auto g = fg(p, 0.0);
    const auto pm = build_pump_matrix(p);
    double best = 1e300, best_th = 0, worst = 0;
    for (int i = 0; i < 720; ++i) {
        const double th = kPi * i / 720;
        const double v = quadrature_state(g, pm, p, 11, th).var_x;
        if (v < best) best = v, best_th = th;
        worst = std::max(worst, v);
    }
    const double mod = std::fmod(best_th, kPi / 2);
    EXPECT_LT(std::min(std::abs(mod - kPi / 4), kPi / 2 - std::abs(mod - kPi / 4)), 0.01);
    EXPECT_LT(best, 1.0);
    EXPECT_GT(worst, 1e2);
}

TEST(Quadrature, HeisenbergEverywhere) {
    std::mt19937_64 rng(2);
    for (int t = 0; t < 10; ++t) {
        const ModelParams p = th::random_params(rng, 6);
        try {
            const auto g = fg(p, 0.3 * t - 1.5);
            const auto pm = build_pump_matrix(p);
            for (int j = 0; j < 6; ++j)
                for (double th : {0.0, 0.8, 2.1}) EXPECT_TRUE(quadrature_state(g, pm, p, j, th).heisenberg_ok(1e-8));
        } catch (const NumericalError&) {
        }
    }
}

TEST(Quadrature, DoubleHatanoNelsonAmplifiesBoth) {
    const ModelParams p = double_hatano_nelson_params();
    const auto pm = build_pump_matrix(p);
    for (double w : {-1.0, 0.0, 1.0}) {
        const auto g = fg(p, w);
        for (int j = 0; j < p.n_sites; ++j) {
            const auto q = quadrature_state(g, pm, p, j, kPi / 4);
            EXPECT_GT(q.var_x, 1.0);
            EXPECT_GT(q.var_p, 1.0);
        }
        const auto q = quadrature_state(g, pm, p, p.n_sites - 1, kPi / 4);
        EXPECT_GT(std::abs(q.var_x / q.var_p - 1), 1e-3);
    }
}

TEST(Trajectory, LastSiteMomentumSqueezed) {
    std::vector<double> ws;
    for (int i = 0; i <= 20; ++i) ws.push_back(-1 + 0.1 * i);
    const auto t = squeezing_trajectory(canonical_params(), {11}, ws);
    ASSERT_EQ(t.size(), 1u);
    for (const auto& pt : t[0].points) EXPECT_EQ(pt.cls, SqueezeClass::p_squeezed) << pt.state.omega;
}

TEST(Trajectory, SqueezingWeakensTowardInput) {
    std::vector<int> sites;
    for (int j = 1; j < 12; ++j) sites.push_back(j);
    const auto t = squeezing_trajectory(canonical_params(), sites, {0.0});
    for (size_t k = 1; k < t.size(); ++k)
        EXPECT_LT(t[k].points[0].state.var_p, t[k - 1].points[0].state.var_p) << "site " << t[k].site;
}

TEST(Trajectory, DoubleHatanoNelsonUnsqueezed) {
    std::vector<int> sites;
    for (int j = 0; j < 12; ++j) sites.push_back(j);
    const auto t = squeezing_trajectory(double_hatano_nelson_params(), sites, {-1.0, -0.5, 0.0, 0.5, 1.0});
    for (const auto& s : t)
        for (const auto& pt : s.points) EXPECT_EQ(pt.cls, SqueezeClass::unsqueezed);
}

TEST(Trajectory, ThreadCountIrrelevant) {
    const std::vector<double> ws = {-0.5, 0.0, 0.5};
    const auto a = squeezing_trajectory(canonical_params(), {3, 11}, ws, kPi / 4, 1);
    const auto b = squeezing_trajectory(canonical_params(), {3, 11}, ws, kPi / 4, 3);
    for (size_t s = 0; s < a.size(); ++s)
        for (size_t i = 0; i < ws.size(); ++i) {
            EXPECT_EQ(a[s].points[i].state.var_x, b[s].points[i].state.var_x);
            EXPECT_EQ(a[s].points[i].state.var_p, b[s].points[i].state.var_p);
        }
}
