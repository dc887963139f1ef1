#include "topamp/greens.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

namespace topamp {

CMat2 FiniteGreen::block(int j, int l) const {
    const int a = p(j), b = p(l), n = n_sites;
    CMat2 m;
    m << matrix(a, b), matrix(a, n + b), matrix(n + a, b), matrix(n + a, n + b);
    return m;
}

HoppingMatrices hopping_matrices(const ModelParams& p) {
    const cplx e = std::polar(p.hop, p.phi);
    HoppingMatrices h;
    h.v_plus << e + I1 * p.pump, p.g_c, -p.g_c, -std::conj(e) + I1 * p.pump;
    h.v_minus << std::conj(e) + I1 * p.pump, p.g_c, -p.g_c, -e + I1 * p.pump;
    return h;
}

namespace {

double block_norm(const CMat& g, int n, int a, int b) {
    CMat2 m;
    m << g(a, b), g(a, n + b), g(n + a, b), g(n + a, n + b);
    return m.norm();
}

PropagationFrame compute_frame(const ModelParams& p) {
    ModelParams q = p;
    q.n_sites = 16;
    const auto h = build_dynamical_matrix(q, Boundary::open);
    const int n = q.n_sites;
    double score = 0.0;
    for (double w : {0.0, 0.5, -0.5, 1.5, -1.5}) {
        Eigen::PartialPivLU<CMat> lu(w * CMat::Identity(2 * n, 2 * n) - h.entries);
        const CMat g = lu.inverse();
        if (!g.allFinite()) continue;
        const double to_right = block_norm(g, n, n - 1, 0);
        const double to_left = block_norm(g, n, 0, n - 1);
        if (to_right > 0 && to_left > 0 && std::isfinite(to_right) && std::isfinite(to_left))
            score += std::log(to_left / to_right);
    }
    const auto v = hopping_matrices(p);
    PropagationFrame f;
    // ties (reciprocal chains) keep the left edge
    f.edge = score > 1e-6 ? InputEdge::right : InputEdge::left;
    f.forward_is_plus = f.edge == InputEdge::right;
    f.forward = f.forward_is_plus ? v.v_plus : v.v_minus;
    f.backward = f.forward_is_plus ? v.v_minus : v.v_plus;
    return f;
}

}  // namespace

PropagationFrame propagation_frame(const ModelParams& p) {
    p.validate();
    using Key = std::array<double, 7>;
    static std::mutex mu;
    static std::map<Key, InputEdge> cache;
    const Key key{p.delta, p.hop, p.phi, p.g_s, p.g_c, p.gamma, p.pump};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) {
            const auto v = hopping_matrices(p);
            PropagationFrame f;
            f.edge = it->second;
            f.forward_is_plus = f.edge == InputEdge::right;
            f.forward = f.forward_is_plus ? v.v_plus : v.v_minus;
            f.backward = f.forward_is_plus ? v.v_minus : v.v_plus;
            return f;
        }
    }
    const auto f = compute_frame(p);
    std::lock_guard<std::mutex> lock(mu);
    if (cache.size() > 100000) cache.clear();
    cache.emplace(key, f.edge);
    return f;
}

FiniteGreen finite_green(const DynamicalMatrix& h, double omega, const FiniteGreenOptions& opt) {
    return finite_green(h, omega, propagation_frame(h.params), opt);
}

FiniteGreen finite_green(const DynamicalMatrix& h, double omega, const PropagationFrame& frame,
                         const FiniteGreenOptions& opt) {
    if (!std::isfinite(omega)) throw ParameterError("omega must be finite");
    const Eigen::Index d = h.entries.rows();
    const CMat m = omega * CMat::Identity(d, d) - h.entries;
    Eigen::PartialPivLU<CMat> lu(m);
    FiniteGreen g;
    g.omega = omega;
    g.n_sites = h.n();
    g.frame = frame;
    const double rc = lu.rcond();
    g.condition = rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
    if (!(g.condition < opt.max_condition)) {
        std::ostringstream os;
        os << "omega - H is near singular at omega = " << omega << " (condition ~ " << g.condition << ")";
        throw NumericalError(os.str());
    }
    g.matrix = lu.inverse();
    const double gmax = g.matrix.cwiseAbs().maxCoeff();
    g.residual = (m * g.matrix - CMat::Identity(d, d)).cwiseAbs().maxCoeff() / std::max(1.0, gmax);
    if (!(g.residual < 1e-9)) {
        std::ostringstream os;
        os << "inverse residual " << g.residual << " too large at omega = " << omega;
        throw NumericalError(os.str());
    }
    return g;
}

CMat2 bare_site_inverse(const ModelParams& p, double omega) {
    const cplx loss = I1 * ((p.gamma - 4 * p.pump) / 2);
    CMat2 m;
    m << omega - p.delta + loss, -p.g_s, p.g_s, omega + p.delta + loss;
    return m;
}

CMat2 bare_site_green(const ModelParams& p, double omega) {
    const CMat2 m = bare_site_inverse(p, omega);
    const cplx det = m.determinant();
    if (std::abs(det) < 1e-14 * std::max(1.0, m.squaredNorm())) throw NumericalError("isolated-site block is singular");
    CMat2 inv;
    inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
    return inv / det;
}

double surface_residual(const CMat2& G, const CMat2& g00, const PropagationFrame& f) {
    return (G - g00 * (CMat2::Identity() + f.backward * G * f.forward * G)).norm();
}

namespace {

// G of an n-site chain seen from its input edge, grown one site at a time
std::pair<CMat2, int> finite_size_limit(const CMat2& ginv, const CMat2& g00, const PropagationFrame& f) {
    CMat2 G = g00;
    double delta = std::numeric_limits<double>::infinity();
    int n = 1;
    for (; n < kSurfaceMaxSites; ++n) {
        const CMat2 next = (ginv - f.backward * G * f.forward).inverse();
        if (!next.allFinite()) throw ConvergenceError("finite-size surface recursion produced non-finite values");
        delta = (next - G).cwiseAbs().maxCoeff() / std::max(1.0, next.cwiseAbs().maxCoeff());
        G = next;
        if (delta < 1e-11) break;
    }
    if (!(delta < 1e-11)) {
        std::ostringstream os;
        os << "surface Green's function did not converge by N = " << kSurfaceMaxSites << " (last delta " << delta << ")";
        throw ConvergenceError(os.str());
    }
    // Extra sweeps only while the update keeps shrinking: when forward gain times backward
    // decay exceeds one, rounding errors are amplified by further sweeps.
    for (int extra = 0; extra < 200; ++extra) {
        const CMat2 next = (ginv - f.backward * G * f.forward).inverse();
        const double d = (next - G).cwiseAbs().maxCoeff() / std::max(1.0, next.cwiseAbs().maxCoeff());
        if (!next.allFinite() || d >= 0.5 * delta) break;
        G = next;
        delta = d;
        ++n;
    }
    return {G, n};
}

}  // namespace

SurfaceGreen surface_green(const ModelParams& p, double omega, SurfaceSolver solver) {
    if (!std::isfinite(omega)) throw ParameterError("omega must be finite");
    SurfaceGreen s;
    s.omega = omega;
    s.solver = solver;
    s.frame = propagation_frame(p);
    const auto v = hopping_matrices(p);
    s.v_plus = v.v_plus;
    s.v_minus = v.v_minus;
    s.g00 = bare_site_green(p, omega);
    const CMat2 ginv = bare_site_inverse(p, omega);

    if (solver == SurfaceSolver::finite_size_limit) {
        std::tie(s.G00, s.iterations) = finite_size_limit(ginv, s.g00, s.frame);
    } else {
        CMat2 G = s.g00;
        bool done = false;
        int it = 0;
        for (; it < 100000; ++it) {
            const CMat2 next = 0.5 * G + 0.5 * s.g00 * (CMat2::Identity() + s.frame.backward * G * s.frame.forward * G);
            if (!next.allFinite() || next.cwiseAbs().maxCoeff() > 1e150)
                throw ConvergenceError("fixed-point iteration diverged; use the finite_size_limit solver");
            const double d = (next - G).norm();
            G = next;
            if (d < 1e-12) {
                done = true;
                break;
            }
        }
        if (!done) throw ConvergenceError("fixed-point iteration did not converge; use the finite_size_limit solver");
        s.G00 = G;
        s.iterations = it + 1;
        try {
            const auto ref = finite_size_limit(ginv, s.g00, s.frame).first;
            const double diff = (ref - G).cwiseAbs().maxCoeff();
            if (diff > 1e-8 * std::max(1.0, ref.cwiseAbs().maxCoeff())) {
                std::ostringstream os;
                os << "fixed point converged to a non-physical branch (differs from the finite-size limit by " << diff
                   << ")";
                throw NumericalError(os.str());
            }
        } catch (const ConvergenceError&) {
            s.validated = false;
        }
    }
    s.residual = surface_residual(s.G00, s.g00, s.frame);
    // absolute below |G| ~ 1, relative once G00 itself grows (near gap closings)
    const double scale = std::max(1.0, s.G00.norm());
    if (!(s.residual < 1e-10 * scale * scale)) {
        std::ostringstream os;
        os << "surface Green's function residual " << s.residual << " at omega = " << omega;
        throw NumericalError(os.str());
    }
    return s;
}

namespace {

CMat2 ipow(const CMat2& m, int n) {
    CMat2 r = CMat2::Identity(), b = m;
    while (n > 0) {
        if (n & 1) r = r * b;
        b = b * b;
        n >>= 1;
    }
    return r;
}

cplx ipow(cplx z, int n) {
    cplx r = 1.0;
    while (n > 0) {
        if (n & 1) r *= z;
        z *= z;
        n >>= 1;
    }
    return r;
}

cplx safe_log(cplx z, double scale) {
    if (std::abs(z) <= 1e-14 * scale) return {-std::numeric_limits<double>::infinity(), 0.0};
    return std::log(z);
}

}  // namespace

SpectralSplit spectral_split(const CMat2& m) {
    const cplx tr = m.trace(), det = m.determinant();
    const cplx disc = std::sqrt(tr * tr / 4.0 - det);
    cplx big = tr / 2.0 + disc, alt = tr / 2.0 - disc;
    if (std::abs(alt) > std::abs(big)) std::swap(big, alt);
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    // det/big avoids cancellation in the smaller root
    const cplx small = std::abs(big) > 0 ? det / big : alt;
    if (std::abs(big - small) <= 1e-12 * std::max(1.0, std::abs(big)))
        throw DefectiveError("transfer matrix has a degenerate eigenvalue; projector split unavailable");

    SpectralSplit s;
    s.lambda_plus = big;
    s.lambda_minus = small;
    const CMat2 id = CMat2::Identity();
    s.p_plus = (m - small * id) / (big - small);
    s.p_minus = -(m - big * id) / (big - small);

    const double pn = std::max(1.0, std::max(s.p_plus.cwiseAbs().maxCoeff(), s.p_minus.cwiseAbs().maxCoeff()));
    const double tol = 1e-10 * pn * pn;
    const double e1 = (s.p_plus * s.p_plus - s.p_plus).cwiseAbs().maxCoeff();
    const double e2 = (s.p_minus * s.p_minus - s.p_minus).cwiseAbs().maxCoeff();
    const double e3 = (s.p_plus * s.p_minus).cwiseAbs().maxCoeff();
    const double e4 = (s.p_plus + s.p_minus - id).cwiseAbs().maxCoeff();
    const double e5 = (big * s.p_plus + small * s.p_minus - m).cwiseAbs().maxCoeff() / scale;
    if (!(std::max({e1, e2, e3, e4}) < tol && e5 < 1e-10 * pn))
        throw NumericalError("projector algebra check failed in spectral split");

    s.zeta_plus = safe_log(big, scale);
    s.zeta_minus = safe_log(small, scale);
    return s;
}

CMat2 split_power(const SpectralSplit& s, int n) {
    if (n < 0) throw ParameterError("negative matrix power");
    if (n == 0) return CMat2::Identity();
    return ipow(s.lambda_plus, n) * s.p_plus + ipow(s.lambda_minus, n) * s.p_minus;
}

CoherenceLengths coherence_lengths(const ModelParams& p, double omega) {
    const auto s = surface_green(p, omega);
    CoherenceLengths c;
    c.forward = spectral_split(s.G00 * s.frame.forward);
    c.backward = spectral_split(s.G00 * s.frame.backward);
    c.zeta_plus = c.forward.zeta_plus;
    c.zeta_minus = c.forward.zeta_minus;
    return c;
}

namespace {

struct Powers {
    CMat2 m;
    bool split_ok = false;
    SpectralSplit split;

    explicit Powers(const CMat2& mm) : m(mm) {
        try {
            split = spectral_split(m);
            split_ok = true;
        } catch (const DefectiveError&) {
            split_ok = false;  // Jordan block: plain products instead
        }
    }
    CMat2 operator()(int n) const { return split_ok ? split_power(split, n) : ipow(m, n); }
};

}  // namespace

CMat2 semi_infinite_green(const SurfaceGreen& s, int j, int l) {
    if (j < 0 || l < 0) throw ParameterError("site indices must be >= 0");
    const Powers a(s.G00 * s.frame.forward), b(s.G00 * s.frame.backward);
    CMat2 out = (j >= l ? a(j - l) : b(l - j)) * s.G00;
    for (int r = 0; r < std::min(j, l); ++r) out += a(j - r) * b(l - r) * s.G00;
    return out;
}

CMat2 semi_infinite_green(const ModelParams& p, double omega, int j, int l) {
    return semi_infinite_green(surface_green(p, omega), j, l);
}

}  // namespace topamp
