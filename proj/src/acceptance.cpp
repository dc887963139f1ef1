#include "topamp/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "topamp/disorder.hpp"
#include "topamp/floquet.hpp"
#include "topamp/observables.hpp"
#include "topamp/reports.hpp"
#include "topamp/spectral.hpp"
#include "topamp/topology.hpp"

namespace topamp {

namespace {

struct Checks {
    bool ok = true;
    std::ostringstream os;

    void check(bool cond, const std::string& what) {
        if (os.tellp() > 0) os << "; ";
        os << what << (cond ? "" : " [FAIL]");
        ok = ok && cond;
    }
};

std::string num(double v, int prec = 6) {
    std::ostringstream os;
    os.precision(prec);
    os << v;
    return os.str();
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

// deterministic pseudo-random draws for the property suites
struct Draws {
    std::uint64_t seed;
    std::uint64_t n = 0;
    double uniform(double lo, double hi) { return lo + (hi - lo) * counter_uniform(seed, 0, n++); }
};

ModelParams random_params(Draws& d, int n_sites) {
    ModelParams p;
    p.delta = d.uniform(-1, 1);
    p.hop = d.uniform(0.5, 1.5);
    p.phi = d.uniform(-kPi, kPi);
    p.g_s = d.uniform(-1, 1);
    p.g_c = d.uniform(-1, 1);
    p.gamma = d.uniform(0, 6);
    p.pump = d.uniform(0, 1);
    p.n_sites = n_sites;
    return p;
}

void criterion1(Checks& c) {
    const auto p = canonical_params();
    const auto h = build_dynamical_matrix(p);
    const auto frame = propagation_frame(p);
    double worst = 0, worst_w = 0;
    for (double w : linspace(-2, 2, 161)) {
        const double e = rel(gain(finite_green(h, w, frame), p, 8), gain_closed_form(p, 8, w));
        if (e > worst) worst = e, worst_w = w;
    }
    c.check(worst < 0.05, "max rel dev finite N=12 vs closed form over |w|<=2: " + num(worst) + " at w=" + num(worst_w));
    const double semi = gain_semi_infinite(p, 8, 0.0);
    c.check(rel(semi, 262144.0) < 1e-6, "semi-infinite G_8(0) = " + num(semi, 12));
}

void criterion2(Checks& c) {
    const auto p = canonical_params();
    const auto s = surface_green(p, 0.0);
    CMat2 target;
    target << 2.0 * I1, 1.0, -1.0, 2.0 * I1;
    target /= -3.0;
    const double err = (s.G00 - target).cwiseAbs().maxCoeff();
    c.check(err < 1e-10, "G00 entrywise error " + num(err));
    c.check(s.residual < 1e-10, "decimation residual " + num(s.residual));
}

void criterion3(Checks& c) {
    auto p = canonical_params();
    const auto cl = coherence_lengths(p, 0.0);
    const auto& f = cl.forward;
    const double el = std::max(std::abs(f.lambda_plus - 2.0), std::abs(f.lambda_minus));
    CMat2 pp;
    pp << 0.5, -0.5 * I1, 0.5 * I1, 0.5;
    const double ep = (f.p_plus - pp).cwiseAbs().maxCoeff();
    c.check(el < 1e-10, "lambda = {" + num(f.lambda_plus.real()) + ", " + num(std::abs(f.lambda_minus)) + "} err " + num(el));
    c.check(ep < 1e-10, "P+ err " + num(ep));
    const double ez = std::abs(cl.zeta_plus - std::log(2.0));
    c.check(ez < 1e-10, "zeta+(0) - ln2 = " + num(ez));
    double last = 0;
    bool grows = true;
    // beyond m = 4 the isolated-site block itself is numerically singular
    for (int m = 1; m <= 4; ++m) {
        p.gamma = 2 + std::pow(10.0, -m);
        const double z = std::abs(coherence_lengths(p, 0.0).zeta_plus);
        grows = grows && z > last;
        last = z;
    }
    c.check(grows && last > 10, "|zeta+| along gamma = 2 + 10^-m, m=1..4 grows to " + num(last));
}

struct GridCheck {
    int compared = 0, disagree = 0, excluded = 0;
};

GridCheck compare_grid(const PhaseDiagramGrid& g) {
    GridCheck r;
    for (const auto& pt : g.points) {
        if (pt.w1 == kWindingSentinel || pt.w_plus == kWindingSentinel || pt.w_minus == kWindingSentinel) {
            ++r.excluded;
            continue;
        }
        ++r.compared;
        if (pt.w1 != pt.w_plus + pt.w_minus) ++r.disagree;
    }
    return r;
}

void criterion4(Checks& c, int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    auto p = canonical_params();
    const auto g2 = phase_diagram(p, SweepSpec{"gamma", 0, 8, 101}, SweepSpec{"omega", -4, 4, 101}, kDefaultNk, 0.0, threads);
    const auto r2 = compare_grid(g2);
    int ones = 0, zeros = 0;
    for (const auto& pt : g2.points) ones += pt.w1 == 1, zeros += pt.w1 == 0;
    const auto& centre = g2.at(50, 50);
    c.check(r2.disagree == 0, "gamma-omega grid: " + std::to_string(r2.compared) + " compared, " +
                                  std::to_string(r2.disagree) + " disagree, " + std::to_string(r2.excluded) + " gap points");
    c.check(ones > 0 && zeros > 0 && centre.w1 == 1,
            "W1=1 island " + std::to_string(ones) + " points, W1(gamma=4, w=0) = " + std::to_string(centre.w1));

    auto q = double_hatano_nelson_params();
    const auto g8 = phase_diagram(q, SweepSpec{"pump", 0, 1.5, 101}, SweepSpec{"omega", -4, 4, 101}, kDefaultNk, 0.0, threads);
    const auto r8 = compare_grid(g8);
    const auto& red = g8.at(50, 50);
    c.check(r8.disagree == 0, "pump-omega grid: " + std::to_string(r8.compared) + " compared, " +
                                  std::to_string(r8.disagree) + " disagree, " + std::to_string(r8.excluded) + " gap points");
    c.check(red.w1 == 2, "W1(P=0.75, gamma=4, g=0.1, w=0) = " + std::to_string(red.w1));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.check(secs < 300, "runtime " + num(secs, 3) + " s");
}

double ensemble_mean_min(const ModelParams& p, double w, int threads, double* max_second = nullptr) {
    EnsembleSpec s;
    s.base_params = p;
    s.strength = w;
    s.n_realizations = 100;
    s.seed = 20220101;
    s.omega = 0.0;
    const auto e = ensemble_spectrum(s, threads);
    double sum = 0, worst = 0;
    int ok = 0;
    for (const auto& r : e.realizations)
        if (r.ok) {
            sum += r.min_sv;
            worst = std::max(worst, r.second_sv);
            ++ok;
        }
    if (max_second) *max_second = worst;
    return sum / ok;
}

void criterion5(Checks& c, int threads) {
    auto topo = canonical_params();
    topo.n_sites = 50;
    auto triv = topo;
    triv.gamma = 0.0;
    const double mt = ensemble_mean_min(topo, 0.1, threads);
    const double mv = ensemble_mean_min(triv, 0.1, threads);
    c.check(10 * mt <= mv, "w=0.1 mean min sv: topological " + num(mt) + ", trivial " + num(mv));
    for (double w : {0.05, 0.1, 0.2}) {
        const double m = ensemble_mean_min(topo, w, threads);
        c.check(m < 1e-2, "topological w=" + num(w) + ": " + num(m));
    }
}

void criterion6(Checks& c, int threads) {
    auto p = double_hatano_nelson_params();
    p.n_sites = 50;
    double worst = 0;
    const double mean = ensemble_mean_min(p, 0.2, threads, &worst);
    c.check(worst < 1e-2, "w=0.2 max second-smallest sv over 100 realizations " + num(worst) + " (mean smallest " +
                              num(mean) + ")");
}

void criterion7(Checks& c) {
    const auto p = canonical_params();
    const auto obc = stability_report(build_dynamical_matrix(p, Boundary::open));
    const auto pbc = stability_report(build_dynamical_matrix(p, Boundary::periodic));
    c.check(obc.stable, "canonical OBC max Im " + num(obc.max_im_eigenvalue));
    c.check(!pbc.stable, "canonical PBC max Im " + num(pbc.max_im_eigenvalue));
    auto q = double_hatano_nelson_params();
    int onset = -1;
    for (int n = 12; n <= 60; ++n) {
        q.n_sites = n;
        if (!stability_report(build_dynamical_matrix(q)).stable) {
            onset = n;
            break;
        }
    }
    q.n_sites = 12;
    const bool s12 = stability_report(build_dynamical_matrix(q)).stable;
    q.n_sites = 60;
    const bool s60 = stability_report(build_dynamical_matrix(q)).stable;
    c.check(s12 && !s60, std::string("W1=2 point stable at N=12: ") + (s12 ? "yes" : "no") + ", at N=60: " + (s60 ? "yes" : "no"));
    c.check(onset >= 40 && onset <= 60, "instability onset N = " + std::to_string(onset));
}

double min_noise(const ModelParams& p, int site, const std::vector<double>& omegas, const FiniteGreenOptions& opt,
                 double* at = nullptr) {
    const auto h = build_dynamical_matrix(p);
    const auto pm = build_pump_matrix(p);
    const auto frame = propagation_frame(p);
    double best = std::numeric_limits<double>::infinity();
    for (double w : omegas) {
        const auto a = added_noise(finite_green(h, w, frame, opt), pm, p, site);
        if (!a.gain_underflow && a.n_add < best) {
            best = a.n_add;
            if (at) *at = w;
        }
    }
    return best;
}

// Condition numbers track the end-to-end gain of a directional amplifier (~1e20 at N = 12 near
// gamma = 2, ~1e37 for the W1=2 point at N = 48); the inverse residual is still checked.
FiniteGreenOptions loose_condition() {
    FiniteGreenOptions o;
    o.max_condition = 1e60;
    return o;
}

void criterion8(Checks& c) {
    auto p = canonical_params();
    const auto omegas = linspace(-2, 2, 401);
    double prev = std::numeric_limits<double>::infinity();
    bool decreasing = true;
    std::string trail;
    for (double g : {2.5, 2.25, 2.1, 2.05}) {
        p.gamma = g;
        const double m = std::min(min_noise(p, 11, omegas, loose_condition()), min_noise(p, 8, omegas, loose_condition()));
        decreasing = decreasing && m < prev;
        prev = m;
        trail += (trail.empty() ? "" : ", ") + num(g, 3) + ":" + num(m);
        c.check(m < 1.2, "canonical gamma=" + num(g, 3) + " min n_add " + num(m));
    }
    c.check(decreasing, "min n_add decreases toward 1 as gamma -> 2+ (" + trail + ")");

    const auto loose = loose_condition();
    auto q = double_hatano_nelson_params();
    const auto ws = linspace(-1, 1, 101);
    std::vector<std::pair<int, double>> seq;
    std::string list;
    for (int n : {12, 24, 36, 48}) {
        q.n_sites = n;
        const double m = min_noise(q, n - 1, ws, loose);
        seq.emplace_back(n, m);
        list += (list.empty() ? "" : ", ") + std::to_string(n) + ":" + num(m, 8);
    }
    // linear extrapolation in 1/N through the two largest sizes
    const auto [n1, v1] = seq[seq.size() - 2];
    const auto [n2, v2] = seq.back();
    const double extrap = (n2 * v2 - n1 * v1) / (n2 - n1);
    c.check(std::abs(extrap - 1.95) <= 0.1,
            "W1=2 point min n_add by N {" + list + "}, extrapolated " + num(extrap, 8) + " vs 1.95 +- 0.1");
}

void criterion9(Checks& c) {
    auto p = canonical_params();
    const auto pm = build_pump_matrix(p);
    const auto h = build_dynamical_matrix(p);
    const auto frame = propagation_frame(p);
    const double edge = std::sqrt(3.0);
    double max_vp = 0, min_vx = std::numeric_limits<double>::infinity(), vx0 = 0;
    for (double w : linspace(-0.98 * edge, 0.98 * edge, 99)) {
        const auto q = quadrature_state(finite_green(h, w, frame), pm, p, 11, kPi / 4);
        max_vp = std::max(max_vp, q.var_p);
        min_vx = std::min(min_vx, q.var_x);
    }
    vx0 = quadrature_state(finite_green(h, 0.0, frame), pm, p, 11, kPi / 4).var_x;
    c.check(max_vp < 1, "canonical j=11 max var_p over window " + num(max_vp));
    c.check(min_vx > 1 && vx0 > 1e2, "var_x > 1 over window (min " + num(min_vx) + "), var_x(0) = " + num(vx0));

    // Heisenberg product over several parameter sets, sites, frequencies and angles
    std::vector<ModelParams> sets = {canonical_params(), double_hatano_nelson_params()};
    {
        auto a = canonical_params();
        a.gamma = 1.0;
        sets.push_back(a);
        a.gamma = 2.5;
        sets.push_back(a);
        Draws d{7};
        for (int i = 0; i < 4; ++i) {
            auto r = random_params(d, 6);
            if (stability_report(build_dynamical_matrix(r)).stable) sets.push_back(r);
        }
    }
    double worst = std::numeric_limits<double>::infinity();
    int evaluated = 0;
    for (const auto& s : sets) {
        const auto hs = build_dynamical_matrix(s);
        const auto ps = build_pump_matrix(s);
        const auto fs = propagation_frame(s);
        for (double w : linspace(-3, 3, 25)) {
            FiniteGreen g;
            try {
                g = finite_green(hs, w, fs);
            } catch (const NumericalError&) {
                continue;
            }
            for (int j = 0; j < s.n_sites; ++j)
                for (double th : {0.0, kPi / 8, kPi / 4, kPi / 2, 3 * kPi / 4}) {
                    const auto q = quadrature_state(g, ps, s, j, th);
                    worst = std::min(worst, q.var_x * q.var_p);
                    ++evaluated;
                }
        }
    }
    c.check(worst >= 1 - 1e-9, "min var_x*var_p over " + std::to_string(evaluated) + " states " + num(worst, 12));

    auto q = double_hatano_nelson_params();
    const auto hq = build_dynamical_matrix(q);
    const auto pq = build_pump_matrix(q);
    const auto fq = propagation_frame(q);
    double vmin = std::numeric_limits<double>::infinity();
    for (double w : linspace(-3, 3, 61)) {
        const auto g = finite_green(hq, w, fq);
        for (int j = 1; j < q.n_sites; ++j) {
            const auto s = quadrature_state(g, pq, q, j, kPi / 4);
            vmin = std::min({vmin, s.var_x, s.var_p});
        }
    }
    c.check(vmin > 1, "W1=2 point min variance over sites and |w|<=3: " + num(vmin));
}

void criterion10(Checks& c, int threads) {
    Draws d{42};
    // chiral anticommutation
    double chiral = 0;
    for (int i = 0; i < 10; ++i) {
        const auto p = random_params(d, 3 + i);
        const auto dm = build_doubled_matrix(build_dynamical_matrix(p), d.uniform(-3, 3));
        const CMat tz = tau_z(dm.entries.rows());
        chiral = std::max(chiral, (tz * dm.entries * tz + dm.entries).cwiseAbs().maxCoeff());
        const auto db = build_doubled_matrix(bloch_matrix(p, d.uniform(-kPi, kPi)), 0.3);
        const CMat tb = tau_z(4);
        chiral = std::max(chiral, (tb * db.entries * tb + db.entries).cwiseAbs().maxCoeff());
    }
    c.check(chiral == 0.0, "chiral anticommutation max " + num(chiral));

    // singular values vs doubled eigenvalues
    double pairing = 0;
    for (int i = 0; i < 8; ++i) {
        const auto p = random_params(d, 5 + 5 * i);
        const auto h = build_dynamical_matrix(p);
        const double w = d.uniform(-3, 3);
        const auto s = singular_spectrum(h, w, false);
        Eigen::SelfAdjointEigenSolver<CMat> es(build_doubled_matrix(h, w).entries, Eigen::EigenvaluesOnly);
        const Eigen::Index n = s.values.size();
        const RVec ev = es.eigenvalues();
        const double scale = std::max(1.0, s.values(n - 1));
        pairing = std::max(pairing, (ev.tail(n) - s.values).cwiseAbs().maxCoeff() / scale);
        pairing = std::max(pairing, (ev.head(n).reverse() + s.values).cwiseAbs().maxCoeff() / scale);
    }
    c.check(pairing < 1e-9, "SVD/eigen pairing max rel " + num(pairing));

    // projector algebra on random 2x2 matrices
    double proj = 0;
    for (int i = 0; i < 200; ++i) {
        CMat2 m;
        for (int k = 0; k < 4; ++k) m(k / 2, k % 2) = cplx(d.uniform(-2, 2), d.uniform(-2, 2));
        const auto s = spectral_split(m);
        const CMat2 id = CMat2::Identity();
        proj = std::max({proj, (s.p_plus * s.p_plus - s.p_plus).cwiseAbs().maxCoeff(),
                         (s.p_minus * s.p_minus - s.p_minus).cwiseAbs().maxCoeff(),
                         (s.p_plus * s.p_minus).cwiseAbs().maxCoeff(), (s.p_plus + s.p_minus - id).cwiseAbs().maxCoeff(),
                         (s.lambda_plus * s.p_plus + s.lambda_minus * s.p_minus - m).cwiseAbs().maxCoeff()});
    }
    c.check(proj < 1e-10, "projector algebra max error " + num(proj));

    // finite vs semi-infinite on stable sets
    double agree = 0;
    std::vector<ModelParams> stable_sets = {canonical_params(), double_hatano_nelson_params()};
    {
        auto a = canonical_params();
        a.gamma = 3.0;
        stable_sets.push_back(a);
    }
    for (const auto& base : stable_sets)
        for (double w : {0.0, 0.5}) {
            const auto s = surface_green(base, w);
            for (int j = 0; j <= 10; ++j) {
                auto p = base;
                p.n_sites = j + 20;
                const auto g = finite_green(build_dynamical_matrix(p), w, loose_condition());
                const CMat2 a = g.block(j, 0), b = semi_infinite_green(s, j, 0);
                agree = std::max(agree, (a - b).cwiseAbs().maxCoeff() / b.cwiseAbs().maxCoeff());
            }
        }
    c.check(agree < 1e-6, "finite (N=j+20) vs semi-infinite G_j0 max rel " + num(agree));

    // Bessel-based drive map
    double imag = 0, ident = 0;
    for (double eta : linspace(0.05, 3, 12))
        for (double dp : linspace(-kPi, kPi, 13)) {
            const auto m = local_drive_map(LocalDriveSpec{1.0, eta, dp, 40, std::nullopt});
            imag = std::max(imag, m.imag_residue);
        }
    for (double x : linspace(0, 10, 41)) {
        const auto jn = bessel_sequence(x, 60);
        double s = jn[0] * jn[0];
        for (int n = 1; n <= 60; ++n) s += 2 * jn[n] * jn[n];
        ident = std::max(ident, std::abs(s - 1));
    }
    c.check(imag < 1e-12, "drive-map imaginary residue max " + num(imag));
    c.check(ident < 1e-12, "sum J_n^2 = 1 max error " + num(ident));

    // byte-level determinism across worker counts
    const auto p = canonical_params();
    const SweepSpec sx{"gamma", 1, 7, 7}, sy{"omega", -2, 2, 5};
    const auto a = phase_diagram_table(phase_diagram(p, sx, sy, 256, 0.0, 1)).to_csv();
    const auto b = phase_diagram_table(phase_diagram(p, sx, sy, 256, 0.0, 3)).to_csv();
    EnsembleSpec es;
    es.base_params = p;
    es.base_params.n_sites = 20;
    es.strength = 0.2;
    es.n_realizations = 12;
    es.seed = 99;
    const auto e1 = ensemble_table(es, ensemble_spectrum(es, 1)).to_csv();
    const auto e2 = ensemble_table(es, ensemble_spectrum(es, 4)).to_csv();
    c.check(a == b && e1 == e2, "CSV bytes identical across 1 and several workers");
    (void)threads;
}

const char* kNames[kCriterionCount] = {
    "closed-form gain",       "surface Green's function", "transfer eigenvalues", "winding numbers",
    "zero-mode robustness",   "double Hatano-Nelson robustness", "stability",   "noise quantum limit",
    "squeezing",              "property suites"};

}  // namespace

CriterionResult run_criterion(int id, const AcceptanceOptions& opt) {
    if (id < 1 || id > kCriterionCount) throw ParameterError("no criterion " + std::to_string(id));
    CriterionResult r;
    r.id = id;
    r.name = kNames[id - 1];
    const auto t0 = std::chrono::steady_clock::now();
    Checks c;
    try {
        switch (id) {
            case 1: criterion1(c); break;
            case 2: criterion2(c); break;
            case 3: criterion3(c); break;
            case 4: criterion4(c, opt.threads); break;
            case 5: criterion5(c, opt.threads); break;
            case 6: criterion6(c, opt.threads); break;
            case 7: criterion7(c); break;
            case 8: criterion8(c); break;
            case 9: criterion9(c); break;
            case 10: criterion10(c, opt.threads); break;
        }
    } catch (const std::exception& e) {
        c.check(false, std::string("error: ") + e.what());
    }
    r.passed = c.ok;
    r.detail = c.os.str();
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_result) {
    std::vector<int> ids = opt.only;
    if (ids.empty())
        for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
    std::vector<CriterionResult> out;
    for (int id : ids) {
        out.push_back(run_criterion(id, opt));
        if (on_result) on_result(out.back());
    }
    return out;
}

std::string format_result(const CriterionResult& r) {
    std::ostringstream os;
    os << "criterion " << r.id << " (" << r.name << "): " << (r.passed ? "PASS" : "FAIL") << " [" << num(r.seconds, 3)
       << " s] " << r.detail;
    return os.str();
}

}  // namespace topamp
