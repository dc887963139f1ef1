#include "topamp/observables.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "topamp/parallel.hpp"

namespace topamp {

namespace {

void check_site(int j, int n) {
    if (j < 0 || j >= n) throw ParameterError("site " + std::to_string(j) + " out of range");
}

}  // namespace

OutputAmplitude output_amplitude(const FiniteGreen& g, const ModelParams& p, int j, double) {
    check_site(j, g.n_sites);
    OutputAmplitude a;
    a.signal = (j == 0 ? 1.0 : 0.0) - I1 * p.gamma * g.normal(j, 0);
    a.idler = -I1 * p.gamma * g.anomalous(j, 0);
    return a;
}

double gain(const FiniteGreen& g, const ModelParams& p, int j) {
    if (j < 1) throw ParameterError("gain is defined for sites j >= 1");
    check_site(j, g.n_sites);
    return p.gamma * p.gamma * std::norm(g.normal(j, 0));
}

double gain_semi_infinite(const SurfaceGreen& s, const ModelParams& p, int j) {
    if (j < 1) throw ParameterError("gain is defined for sites j >= 1");
    return p.gamma * p.gamma * std::norm(semi_infinite_green(s, j, 0)(0, 0));
}

double gain_semi_infinite(const ModelParams& p, int j, double omega) {
    return gain_semi_infinite(surface_green(p, omega), p, j);
}

double gain_closed_form(const ModelParams& p, int j, double omega) {
    if (j < 1) throw ParameterError("gain is defined for sites j >= 1");
    const double J = p.hop;
    const double tol = 1e-12 * std::max(1.0, J);
    if (std::abs(p.g_s - J) > tol || std::abs(p.g_c - J) > tol || std::abs(std::cos(p.phi)) > 1e-12 ||
        std::abs(p.delta) > tol || p.pump != 0.0)
        throw ParameterError("closed-form gain needs g_s = g_c = J, cos(phi) = 0, delta = 0, P = 0");
    const double den = omega * omega + (p.gamma / 2 - J) * (p.gamma / 2 - J);
    return p.gamma * p.gamma * std::pow(4.0, j - 1) * std::pow(J, 2 * j) / std::pow(den, j + 1);
}

double AmplifierPoint::n_add_capped() const { return capped() ? kNoiseCap : n_add; }
bool AmplifierPoint::capped() const { return gain_underflow || !std::isfinite(n_add) || n_add > kNoiseCap; }

AmplifierPoint added_noise(const FiniteGreen& g, const RMat& pm, const ModelParams& p, int j) {
    if (j < 1) throw ParameterError("added noise is defined for sites j >= 1");
    check_site(j, g.n_sites);
    const int n = g.n_sites;
    if (pm.rows() != n || pm.cols() != n) throw ParameterError("pump matrix size does not match the chain");
    const int pj = g.p(j);
    const CVec normal_row = g.matrix.row(pj).head(n).transpose();
    const CVec anom_row = g.matrix.row(pj).tail(n).transpose();

    AmplifierPoint a;
    a.site = j;
    a.omega = g.omega;
    a.gain = gain(g, p, j);
    const double pumped = (normal_row.transpose() * pm.cast<cplx>() * normal_row.conjugate())(0, 0).real();
    a.n_amp = p.gamma * p.gamma * anom_row.squaredNorm() + p.gamma * pumped;
    if (a.gain < 1e-30) {
        a.gain_underflow = true;
        a.n_add = std::numeric_limits<double>::quiet_NaN();
    } else {
        a.n_add = a.n_amp / a.gain;
    }
    return a;
}

double semi_infinite_noise(const ModelParams& p, int j, double omega) {
    if (p.pump != 0.0) throw ParameterError("semi-infinite noise is only available for P = 0");
    if (j < 0) throw ParameterError("site must be >= 0");
    const auto s = surface_green(p, omega);
    double head = 0.0;
    for (int l = 0; l <= j; ++l) head += std::norm(semi_infinite_green(s, j, l)(0, 1));

    // for l >= j the block is C_j B^(l-j) G00
    const CMat2 A = s.G00 * s.frame.forward, B = s.G00 * s.frame.backward;
    CMat2 c = CMat2::Identity();
    {
        CMat2 ap = CMat2::Identity(), bp = CMat2::Identity();
        // sum_{r<j} A^(j-r) B^(j-r) = sum_{m=1..j} A^m B^m
        for (int m = 1; m <= j; ++m) {
            ap = ap * A;
            bp = bp * B;
            c += ap * bp;
        }
    }
    const double scale = std::max(1.0, (c * s.G00).cwiseAbs().maxCoeff());
    double tail = 0.0;
    try {
        const auto split = spectral_split(B);
        const cplx mu[2] = {split.lambda_plus, split.lambda_minus};
        const cplx coef[2] = {(c * split.p_plus * s.G00)(0, 1), (c * split.p_minus * s.G00)(0, 1)};
        for (int a = 0; a < 2; ++a)
            if (std::abs(mu[a]) >= 1 && std::abs(coef[a]) > 1e-14 * scale) {
                std::ostringstream os;
                os << "backward transfer eigenvalue |" << std::abs(mu[a]) << "| >= 1; noise tail diverges";
                throw ConvergenceError(os.str());
            }
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const cplx z = mu[a] * std::conj(mu[b]);
                if (std::abs(coef[a]) == 0 || std::abs(coef[b]) == 0) continue;
                tail += (coef[a] * std::conj(coef[b]) * z / (1.0 - z)).real();
            }
    } catch (const DefectiveError&) {
        CMat2 bp = CMat2::Identity();
        for (int m = 1; m < 1000000; ++m) {
            bp = bp * B;
            const double term = std::norm((c * bp * s.G00)(0, 1));
            tail += term;
            if (term < 1e-14 * std::max(tail, 1e-300)) break;
            if (!std::isfinite(tail)) throw ConvergenceError("noise tail diverges");
        }
    }
    return head + tail;
}

QuadratureState quadrature_state(const FiniteGreen& g, const RMat& pm, const ModelParams& p, int j, double theta) {
    check_site(j, g.n_sites);
    const int n = g.n_sites;
    if (pm.rows() != n || pm.cols() != n) throw ParameterError("pump matrix size does not match the chain");
    const int pj = g.p(j), p0 = g.p(0);
    const cplx e = std::polar(1.0, theta);
    const double gam = p.gamma;

    auto variance = [&](cplx c_top, cplx c_bottom) {
        // output spinor row: c_top on a_out_j(omega), c_bottom on a_out_j^dagger(-omega)
        const CVec rg = c_top * g.matrix.row(pj).transpose() + c_bottom * g.matrix.row(n + pj).transpose();
        CVec ca = -I1 * gam * rg.head(n);
        ca(pj) += c_top;
        const CVec v = I1 * std::sqrt(gam) * rg.tail(n);
        const double pumped = (v.transpose() * pm.cast<cplx>() * v.conjugate())(0, 0).real();
        return ca.squaredNorm() + pumped;
    };

    QuadratureState q;
    q.site = j;
    q.omega = g.omega;
    q.theta = theta;
    const cplx top = (j == 0 ? 1.0 : 0.0) - I1 * gam * g.matrix(pj, p0);
    const cplx bottom = -I1 * gam * g.matrix(n + pj, p0);
    q.mean_x = e * top + std::conj(e) * bottom;
    q.mean_p = I1 * e * top - I1 * std::conj(e) * bottom;
    q.var_x = variance(e, std::conj(e));
    q.var_p = variance(I1 * e, -I1 * std::conj(e));
    return q;
}

const char* to_string(SqueezeClass c) {
    switch (c) {
        case SqueezeClass::x_squeezed: return "x_squeezed";
        case SqueezeClass::p_squeezed: return "p_squeezed";
        default: return "unsqueezed";
    }
}

SqueezeClass classify(const QuadratureState& q) {
    if (q.var_x < 1) return SqueezeClass::x_squeezed;
    if (q.var_p < 1) return SqueezeClass::p_squeezed;
    return SqueezeClass::unsqueezed;
}

std::vector<SiteTrajectory> squeezing_trajectory(const ModelParams& p, const std::vector<int>& sites,
                                                 const std::vector<double>& omega_grid, double theta, int threads) {
    const auto h = build_dynamical_matrix(p, Boundary::open);
    const auto pm = build_pump_matrix(p, Boundary::open);
    const auto frame = propagation_frame(p);
    for (int s : sites) check_site(s, p.n_sites);

    auto rows = parallel_map<std::vector<QuadratureState>>(omega_grid.size(), threads, [&](size_t i) {
        const auto g = finite_green(h, omega_grid[i], frame);
        std::vector<QuadratureState> out;
        for (int s : sites) {
            auto q = quadrature_state(g, pm, p, s, theta);
            if (!q.heisenberg_ok()) {
                std::ostringstream os;
                os << "Heisenberg bound violated at site " << s << ", omega " << omega_grid[i];
                throw NumericalError(os.str());
            }
            out.push_back(q);
        }
        return out;
    });

    std::vector<SiteTrajectory> traj(sites.size());
    for (size_t k = 0; k < sites.size(); ++k) {
        traj[k].site = sites[k];
        for (auto& row : rows) traj[k].points.push_back({row[k], classify(row[k])});
    }
    return traj;
}

}  // namespace topamp
