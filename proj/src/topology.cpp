#include "topamp/topology.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include "topamp/parallel.hpp"
#include "topamp/spectral.hpp"

namespace topamp {

namespace {

double grid_k(int i, int n) { return -kPi + 2 * kPi * i / n; }

void check_gap(const CMat2& m, double k) {
    const double scale = std::max(1.0, m.norm());
    const double smin = std::abs(m.determinant()) / scale;
    if (smin < 1e-12 * scale) {
        std::ostringstream os;
        os << "gap closes at k = " << k << " (sigma_min ~ " << smin << ")";
        throw GapClosingError(os.str(), k);
    }
}

}  // namespace

double winding_trace_raw(const ModelParams& p, double omega, int n_k) {
    if (n_k < 64) throw ParameterError("n_k must be >= 64");
    CMat4 tz = CMat4::Identity();
    tz.bottomRightCorner<2, 2>() *= -1.0;
    cplx acc = 0.0;
    for (int i = 0; i < n_k; ++i) {
        const double k = grid_k(i, n_k);
        const CMat2 m = omega * CMat2::Identity() - bloch_matrix(p, k).matrix;
        check_gap(m, k);
        const CMat2 dm = -bloch_matrix_derivative(p, k);
        CMat4 h = CMat4::Zero(), dh = CMat4::Zero();
        h.topRightCorner<2, 2>() = m;
        h.bottomLeftCorner<2, 2>() = m.adjoint();
        dh.topRightCorner<2, 2>() = dm;
        dh.bottomLeftCorner<2, 2>() = dm.adjoint();
        acc += (tz * h.inverse() * dh).trace();
    }
    const cplx w = acc * (2 * kPi / n_k) / (4 * kPi * I1);
    // The chiral trace with tau_z = diag(+1, -1) counts the winding of det(omega - h)^*,
    // so flip the sign to count windings of omega - E(k) counter-clockwise.
    return -w.real();
}

double winding_trace_reduced_raw(const ModelParams& p, double omega, int n_k) {
    if (n_k < 64) throw ParameterError("n_k must be >= 64");
    cplx acc = 0.0;
    for (int i = 0; i < n_k; ++i) {
        const double k = grid_k(i, n_k);
        const CMat2 m = omega * CMat2::Identity() - bloch_matrix(p, k).matrix;
        check_gap(m, k);
        const CMat2 dm = -bloch_matrix_derivative(p, k);
        acc += (m.inverse() * dm).trace();
    }
    return (acc * (2 * kPi / n_k) / (2 * kPi * I1)).real();
}

WindingResult winding_trace(const ModelParams& p, double omega, int n_k) {
    if (n_k < 64) throw ParameterError("n_k must be >= 64");
    for (int n = n_k; n <= kMaxNk; n *= 2) {
        const double raw = winding_trace_raw(p, omega, n);
        const double r = std::round(raw);
        if (std::abs(raw - r) < 1e-3) return {raw, static_cast<int>(r), n};
        if (n > kMaxNk / 2) {
            std::ostringstream os;
            os << "winding trace did not converge to an integer (raw " << raw << " at n_k " << n << ")";
            throw ConvergenceError(os.str());
        }
    }
    throw ConvergenceError("winding trace did not converge");
}

BandPath band_path(const ModelParams& p, double omega, int n_k) {
    if (n_k < 64) throw ParameterError("n_k must be >= 64");
    if (n_k % 2) ++n_k;
    BandPath path;
    path.params = p;
    path.omega = omega;
    path.k_grid.resize(n_k + 1);
    path.e_plus.resize(n_k + 1);
    path.e_minus.resize(n_k + 1);

    auto roots = [&](int i) {
        const auto b = bloch_matrix(p, path.k_grid[i]);
        const cplx s = std::sqrt(b.fz * b.fz + b.fy * b.fy);
        return std::pair<cplx, cplx>{b.f0 + s, b.f0 - s};
    };
    for (int i = 0; i <= n_k; ++i) path.k_grid[i] = grid_k(i, n_k);

    // branch labels are fixed by the principal root at k = 0, then tracked both ways
    const int anchor = n_k / 2;
    std::tie(path.e_plus[anchor], path.e_minus[anchor]) = roots(anchor);
    // match against a linear prediction so that branches pass straight through exceptional points
    auto step = [&](int from, int to) {
        auto [c1, c2] = roots(to);
        cplx a = path.e_plus[from], b = path.e_minus[from];
        const int before = 2 * from - to;
        if (before >= 0 && before <= n_k && std::abs(before - anchor) < std::abs(from - anchor)) {
            a = 2.0 * a - path.e_plus[before];
            b = 2.0 * b - path.e_minus[before];
        }
        if (std::abs(c1 - a) + std::abs(c2 - b) <= std::abs(c2 - a) + std::abs(c1 - b)) {
            path.e_plus[to] = c1;
            path.e_minus[to] = c2;
        } else {
            path.e_plus[to] = c2;
            path.e_minus[to] = c1;
        }
    };
    for (int i = anchor + 1; i <= n_k; ++i) step(i - 1, i);
    for (int i = anchor - 1; i >= 0; --i) step(i + 1, i);

    const double same = std::abs(path.e_plus[n_k] - path.e_plus[0]) + std::abs(path.e_minus[n_k] - path.e_minus[0]);
    const double cross = std::abs(path.e_plus[n_k] - path.e_minus[0]) + std::abs(path.e_minus[n_k] - path.e_plus[0]);
    path.swapped = cross < same;
    return path;
}

namespace {

// accumulated arg increment of (omega - E) along one branch; returns max single step too
std::pair<double, double> arg_sum(const std::vector<cplx>& e, double omega) {
    double total = 0.0, worst = 0.0;
    for (size_t i = 0; i + 1 < e.size(); ++i) {
        const double d = std::arg((omega - e[i + 1]) / (omega - e[i]));
        total += d;
        worst = std::max(worst, std::abs(d));
    }
    return {total, worst};
}

double min_distance(const BandPath& path, double omega) {
    double d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < path.k_grid.size(); ++i)
        d = std::min({d, std::abs(omega - path.e_plus[i]), std::abs(omega - path.e_minus[i])});
    return d;
}

int floor_div2(int a) { return a >= 0 ? a / 2 : -((-a + 1) / 2); }

}  // namespace

BandWinding winding_band_detail(const BandPath& path0, double omega, Branch branch) {
    BandPath path = path0;
    int n_k = static_cast<int>(path.k_grid.size()) - 1;
    double mind = min_distance(path, omega);
    if (!(mind > 1e-8)) {
        std::ostringstream os;
        os << "omega lies on the band path (min distance " << mind << ")";
        throw GapClosingError(os.str(), 0.0);
    }
    while (true) {
        BandWinding r;
        r.n_k = n_k;
        auto [sp, wp] = arg_sum(path.e_plus, omega);
        auto [sm, wm] = arg_sum(path.e_minus, omega);
        double raw;
        if (path.swapped) {
            // the two branches only close as one doubled loop
            raw = (sp + sm) / (2 * kPi);
            r.from_doubled_loop = true;
        } else {
            raw = (branch == Branch::plus ? sp : sm) / (2 * kPi);
        }
        const double worst = std::max(wp, wm);
        const double rr = std::round(raw);
        if (std::abs(raw - rr) < 1e-3 && worst < kPi / 3) {
            const int v = static_cast<int>(rr);
            r.raw = raw;
            if (path.swapped) {
                const int plus = floor_div2(v + 1);
                r.value = branch == Branch::plus ? plus : v - plus;
            } else {
                r.value = v;
            }
            return r;
        }
        if (n_k * 2 > kMaxNk) {
            std::ostringstream os;
            os << "band winding did not converge (min |omega - E| = " << min_distance(path, omega) << ")";
            throw ConvergenceError(os.str());
        }
        n_k *= 2;
        path = band_path(path.params, path.omega, n_k);
    }
}

int winding_band(const BandPath& path, double omega, Branch branch) {
    return winding_band_detail(path, omega, branch).value;
}

double SweepSpec::value(int i) const {
    if (count <= 1) return start;
    return start + (stop - start) * i / (count - 1);
}

SweepSpec SweepSpec::parse(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 4) throw ParameterError("sweep spec must be name:start:stop:count, got '" + text + "'");
    SweepSpec s;
    s.name = parts[0];
    try {
        size_t pos = 0;
        s.start = std::stod(parts[1], &pos);
        if (pos != parts[1].size()) throw std::invalid_argument("start");
        s.stop = std::stod(parts[2], &pos);
        if (pos != parts[2].size()) throw std::invalid_argument("stop");
        s.count = std::stoi(parts[3], &pos);
        if (pos != parts[3].size()) throw std::invalid_argument("count");
    } catch (const std::exception&) {
        throw ParameterError("malformed sweep spec '" + text + "'");
    }
    if (s.count < 1) throw ParameterError("sweep count must be >= 1");
    if (!std::isfinite(s.start) || !std::isfinite(s.stop)) throw ParameterError("sweep bounds must be finite");
    return s;
}

PhasePoint phase_point(const ModelParams& p, double omega, int n_k) {
    PhasePoint pt;
    pt.w1_raw = std::numeric_limits<double>::quiet_NaN();
    pt.max_im_eig = std::numeric_limits<double>::quiet_NaN();
    auto note = [&](const std::string& what, const std::exception& e) {
        if (!pt.error.empty()) pt.error += "; ";
        pt.error += what + ": " + e.what();
    };
    try {
        const auto w = winding_trace(p, omega, n_k);
        pt.w1_raw = w.raw;
        pt.w1 = w.value;
    } catch (const std::exception& e) {
        note("trace", e);
    }
    try {
        const auto path = band_path(p, omega, n_k);
        const auto a = winding_band_detail(path, omega, Branch::plus);
        const auto b = winding_band_detail(path, omega, Branch::minus);
        pt.w_plus = a.value;
        pt.w_minus = b.value;
        pt.band_doubled = a.from_doubled_loop;
    } catch (const std::exception& e) {
        note("band", e);
    }
    try {
        const auto s = stability_report(build_dynamical_matrix(p, Boundary::open));
        pt.stable = s.stable;
        pt.max_im_eig = s.max_im_eigenvalue;
    } catch (const std::exception& e) {
        note("stability", e);
    }
    return pt;
}

PhaseDiagramGrid phase_diagram(const ModelParams& p, const SweepSpec& sx, const SweepSpec& sy, int n_k, double omega,
                               int threads) {
    static const char* allowed[] = {"gamma", "pump", "omega", "delta"};
    for (const auto* s : {&sx, &sy}) {
        bool ok = false;
        for (auto* a : allowed) ok = ok || s->name == a;
        if (!ok) throw ParameterError("phase diagram cannot sweep '" + s->name + "'");
        if (s->count < 1) throw ParameterError("sweep count must be >= 1");
    }
    if (sx.name == sy.name) throw ParameterError("sweep axes must differ");
    if (n_k < 64) throw ParameterError("n_k must be >= 64");
    p.validate();

    PhaseDiagramGrid g;
    g.axis_x = sx;
    g.axis_y = sy;
    const size_t total = static_cast<size_t>(sx.count) * sy.count;
    g.points = parallel_map<PhasePoint>(total, threads, [&](size_t idx) {
        const int ix = static_cast<int>(idx % sx.count), iy = static_cast<int>(idx / sx.count);
        ModelParams q = p;
        double w = omega;
        const double vx = sx.value(ix), vy = sy.value(iy);
        for (auto [name, v] : {std::pair{sx.name, vx}, std::pair{sy.name, vy}}) {
            if (name == "omega") w = v;
            else set_parameter(q, name, v);
        }
        PhasePoint pt;
        try {
            q.validate();
            pt = phase_point(q, w, n_k);
        } catch (const std::exception& e) {
            pt.error = e.what();
            pt.w1_raw = std::numeric_limits<double>::quiet_NaN();
            pt.max_im_eig = std::numeric_limits<double>::quiet_NaN();
        }
        pt.x = vx;
        pt.y = vy;
        return pt;
    });
    return g;
}

}  // namespace topamp
