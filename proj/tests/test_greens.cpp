#include <cmath>

#include "helpers.hpp"
#include "topamp/greens.hpp"

using namespace topamp;

namespace {
CMat2 m2(cplx a, cplx b, cplx c, cplx d) {
    CMat2 m;
    m << a, b, c, d;
    return m;
}
}  // namespace

TEST(FiniteGreen, DecoupledSites) {
    ModelParams p = th::decoupled(2.0);
    p.n_sites = 4;
    const auto g = finite_green(build_dynamical_matrix(p), 0.0);
    for (int i = 0; i < 8; ++i) EXPECT_TRUE(th::close(g.matrix(i, i), cplx(0, -1), 1e-12));
    EXPECT_LT(g.matrix.cwiseAbs().sum() - 8.0, 1e-11);
}

TEST(FiniteGreen, InverseIdentity) {
    std::mt19937_64 rng(1);
    int done = 0;
    for (int t = 0; t < 20 && done < 8; ++t) {
        const ModelParams p = th::random_params(rng, 8);
        const auto h = build_dynamical_matrix(p);
        const double w = 0.2 * t - 1;
        try {
            const auto g = finite_green(h, w);
            const CMat id = (w * CMat::Identity(16, 16) - h.entries) * g.matrix;
            EXPECT_TRUE(th::close(id, CMat::Identity(16, 16), 1e-9));
            EXPECT_LT(g.residual, 1e-12);
            ++done;
        } catch (const NumericalError&) {
        }
    }
    EXPECT_GE(done, 5);
}

TEST(FiniteGreen, CanonicalEndToEnd) {
    const auto g = finite_green(build_dynamical_matrix(canonical_params()), 0.0);
    EXPECT_NEAR(16 * std::norm(g.normal(8, 0)) / 262144.0, 1.0, 1e-9);
    EXPECT_EQ(g.frame.edge, InputEdge::right);
    // the reverse direction is strongly suppressed
    EXPECT_LT(std::norm(g.normal(0, 8)) / std::norm(g.normal(8, 0)), 1e-8);
}

TEST(FiniteGreen, ConditionLimit) {
    ModelParams p;
    p.n_sites = 40;
    EXPECT_THROW(finite_green(build_dynamical_matrix(p), 0.0), NumericalError);
    FiniteGreenOptions loose;
    loose.max_condition = 1e60;
    EXPECT_NO_THROW(finite_green(build_dynamical_matrix(p), 0.0, loose));
}

TEST(BareSite, CanonicalExample) {
    const CMat2 g = bare_site_green(canonical_params(), 0.0);
    EXPECT_TRUE(th::close(CMat(g), CMat(m2(2.0 * I1, 1, -1, 2.0 * I1) / -3.0), 1e-15));
}

TEST(BareSite, NoSqueezingDiagonal) {
    ModelParams p;
    p.g_s = 0;
    p.pump = 0.3;
    p.gamma = 3;
    const double w = 0.7;
    const CMat2 g = bare_site_green(p, w);
    const cplx d = 1.0 / (w + I1 * (p.gamma - 4 * p.pump) / 2.0);
    EXPECT_TRUE(th::close(g(0, 0), d, 1e-14));
    EXPECT_TRUE(th::close(g(1, 1), d, 1e-14));
    EXPECT_EQ(g(0, 1), cplx(0));
}

TEST(BareSite, PumpCancelsLoss) {
    ModelParams p;
    p.g_s = 0;
    p.gamma = 2;
    p.pump = 0.5;
    const CMat2 inv = bare_site_inverse(p, 0.3);
    EXPECT_NEAR(inv(0, 0).imag(), 0.0, 1e-15);
    EXPECT_NEAR(inv(1, 1).imag(), 0.0, 1e-15);
}

TEST(Hopping, CanonicalBlocks) {
    const auto v = hopping_matrices(canonical_params());
    EXPECT_TRUE(th::close(CMat(v.v_plus), CMat(m2(I1, 1, -1, I1)), 1e-15));
    EXPECT_TRUE(th::close(CMat(v.v_minus), CMat(m2(-I1, 1, -1, -I1)), 1e-15));
}

TEST(Hopping, NoFluxDiagonal) {
    ModelParams p;
    p.phi = 0;
    p.g_c = 0;
    const auto v = hopping_matrices(p);
    EXPECT_TRUE(th::close(CMat(v.v_plus), CMat(m2(1, 0, 0, -1)), 1e-15));
    EXPECT_TRUE(th::close(CMat(v.v_minus), CMat(m2(1, 0, 0, -1)), 1e-15));
}

TEST(Hopping, SumIdentityWithPump) {
    ModelParams p;
    p.pump = 0.4;
    p.phi = 0.9;
    p.g_c = 0.6;
    const auto v = hopping_matrices(p);
    const double c = 2 * std::cos(p.phi);
    const CMat2 want = m2(c + 2.0 * I1 * p.pump, 2 * p.g_c, -2 * p.g_c, -c + 2.0 * I1 * p.pump);
    EXPECT_TRUE(th::close(CMat(v.v_plus + v.v_minus), CMat(want), 1e-14));
}

TEST(Hopping, MatchesChainBlocks) {
    std::mt19937_64 rng(4);
    const ModelParams p = th::random_params(rng, 3);
    const CMat h = build_dynamical_matrix(p).entries;
    const auto v = hopping_matrices(p);
    // v_plus couples site l+1 into site l
    const CMat2 up = m2(h(0, 1), h(0, 4), h(3, 1), h(3, 4));
    const CMat2 down = m2(h(1, 0), h(1, 3), h(4, 0), h(4, 3));
    EXPECT_TRUE(th::close(CMat(v.v_plus), CMat(up), 1e-15));
    EXPECT_TRUE(th::close(CMat(v.v_minus), CMat(down), 1e-15));
}

TEST(Surface, CanonicalEqualsBare) {
    for (auto solver : {SurfaceSolver::finite_size_limit, SurfaceSolver::fixed_point}) {
        const auto s = surface_green(canonical_params(), 0.0, solver);
        EXPECT_TRUE(th::close(CMat(s.G00), CMat(m2(2.0 * I1, 1, -1, 2.0 * I1) / -3.0), 1e-12));
        EXPECT_LT(s.residual, 1e-10);
        EXPECT_LT(surface_residual(s.G00, s.g00, s.frame), 1e-10);
    }
}

TEST(Surface, WeakHoppingLimit) {
    ModelParams p;
    p.hop = 1e-7;
    p.g_c = 0;
    const auto s = surface_green(p, 0.2);
    EXPECT_TRUE(th::close(CMat(s.G00), CMat(s.g00), 1e-10));
}

TEST(Surface, ResidualOnRandomPoints) {
    std::mt19937_64 rng(8);
    int ok = 0;
    for (int t = 0; t < 20; ++t) {
        ModelParams p = th::random_params(rng);
        try {
            const auto s = surface_green(p, 0.3 * (t % 7) - 1);
            EXPECT_LT(s.residual, 1e-10 * std::max(1.0, s.G00.squaredNorm()));
            ++ok;
        } catch (const Error&) {
        }
    }
    EXPECT_GT(ok, 10);
}

TEST(Split, CanonicalTransfer) {
    const auto s = surface_green(canonical_params(), 0.0);
    ASSERT_TRUE(s.frame.forward_is_plus);
    const auto sp = spectral_split(s.G00 * s.v_plus);
    EXPECT_TRUE(th::close(sp.lambda_plus, 2.0, 1e-12));
    EXPECT_TRUE(th::close(sp.lambda_minus, 0.0, 1e-12));
    EXPECT_TRUE(th::close(CMat(sp.p_plus), CMat(m2(1, -I1, I1, 1) * 0.5), 1e-12));
}

TEST(Split, DegenerateThrows) { EXPECT_THROW(spectral_split(CMat2::Identity()), DefectiveError); }

TEST(Split, Diagonal) {
    const auto sp = spectral_split(m2(3.0, 0, 0, 0.5));
    EXPECT_TRUE(th::close(CMat(sp.p_plus), CMat(m2(1, 0, 0, 0)), 1e-14));
    EXPECT_TRUE(th::close(CMat(sp.p_minus), CMat(m2(0, 0, 0, 1)), 1e-14));
    EXPECT_NEAR(sp.zeta_plus.real(), std::log(3.0), 1e-14);
}

TEST(Split, PowerMatchesRepeatedProduct) {
    std::mt19937_64 rng(12);
    std::normal_distribution<double> n(0, 1);
    for (int t = 0; t < 10; ++t) {
        CMat2 m;
        for (int i = 0; i < 4; ++i) m.data()[i] = cplx(n(rng), n(rng)) * 0.6;
        const auto sp = spectral_split(m);
        CMat2 acc = CMat2::Identity();
        for (int k = 0; k <= 7; ++k) {
            EXPECT_TRUE(th::close(CMat(split_power(sp, k)), CMat(acc), 1e-11 * std::max(1.0, acc.norm())));
            acc = acc * m;
        }
        EXPECT_TRUE(th::close(CMat(sp.p_plus + sp.p_minus), CMat(CMat2::Identity()), 1e-12));
    }
}

TEST(Coherence, Canonical) {
    const auto c = coherence_lengths(canonical_params(), 0.0);
    EXPECT_NEAR(c.zeta_plus.real(), std::log(2.0), 1e-12);
    EXPECT_TRUE(std::isinf(c.zeta_minus.real()) && c.zeta_minus.real() < 0);
}

TEST(Coherence, DivergesTowardCriticalLoss) {
    ModelParams p;
    double prev = 0;
    for (int m = 1; m <= 4; ++m) {
        p.gamma = 2 + std::pow(10.0, -m);
        const double z = std::abs(coherence_lengths(p, 0.0).zeta_plus);
        EXPECT_GT(z, prev);
        prev = z;
    }
    EXPECT_GT(prev, 5.0);
}

TEST(Coherence, DoubleHatanoNelsonBothGrow) {
    const ModelParams p = double_hatano_nelson_params();
    for (double w : {-0.5, 0.0, 0.5}) {
        const auto c = coherence_lengths(p, w);
        EXPECT_GT(c.zeta_plus.real(), 0) << w;
        EXPECT_GT(c.zeta_minus.real(), 0) << w;
    }
}

TEST(SemiInfinite, SurfaceEntry) {
    const auto s = surface_green(canonical_params(), 0.0);
    EXPECT_TRUE(th::close(CMat(semi_infinite_green(s, 0, 0)), CMat(s.G00), 0.0));
}

TEST(SemiInfinite, FirstStep) {
    const CMat2 g = semi_infinite_green(canonical_params(), 0.0, 1, 0);
    EXPECT_TRUE(th::close(CMat(g), CMat(m2(-I1, -1, 1, -I1)), 1e-12));
    EXPECT_NEAR(16 * std::norm(g(0, 0)), 16.0, 1e-11);
}

TEST(SemiInfinite, MatchesLongFiniteChain) {
    std::vector<ModelParams> cases = {canonical_params()};
    ModelParams q;
    q.gamma = 3;
    q.delta = 0.2;
    cases.push_back(q);
    for (const auto& base : cases) {
        for (double w : {0.0, 0.4}) {
            ModelParams p = base;
            p.n_sites = 40;
            FiniteGreenOptions loose;
            loose.max_condition = 1e60;
            const auto f = finite_green(build_dynamical_matrix(p), w, loose);
            const auto s = surface_green(p, w);
            for (int j = 0; j <= 10; ++j)
                for (int l = 0; l <= 10; ++l) {
                    const CMat2 a = semi_infinite_green(s, j, l), b = f.block(j, l);
                    EXPECT_LE((a - b).norm(), 1e-6 * std::max(b.norm(), 1e-300)) << j << "," << l << " w=" << w;
                }
        }
    }
}
