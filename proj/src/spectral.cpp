#include "topamp/spectral.hpp"

#include <cmath>
#include <limits>

namespace topamp {

SingularSpectrum singular_spectrum(const DynamicalMatrix& h, double omega, bool cross_check) {
    if (!std::isfinite(omega)) throw ParameterError("omega must be finite");
    const Eigen::Index d = h.entries.rows();
    const CMat m = omega * CMat::Identity(d, d) - h.entries;
    Eigen::BDCSVD<CMat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.info() != Eigen::Success) throw NumericalError("SVD did not converge");

    SingularSpectrum s;
    s.omega = omega;
    s.periodic = h.boundary == Boundary::periodic;
    s.values = svd.singularValues().reverse();
    s.left_vectors = svd.matrixU().rowwise().reverse();
    s.right_vectors = svd.matrixV().rowwise().reverse();

    if (cross_check) {
        Eigen::SelfAdjointEigenSolver<CMat> es(build_doubled_matrix(h, omega).entries, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success) throw NumericalError("doubled-matrix eigensolver failed");
        const RVec ev = es.eigenvalues().tail(d);
        const double tol = 1e-9 * std::max(1.0, s.values(d - 1));
        const double err = (ev - s.values).cwiseAbs().maxCoeff();
        if (!(err <= tol))
            throw NumericalError("singular values and doubled-matrix eigenvalues disagree by " + std::to_string(err));
    }
    return s;
}

ZeroModeCensus zero_mode_census(const SingularSpectrum& s, double threshold) {
    if (!(threshold > 0)) throw ParameterError("census threshold must be > 0");
    ZeroModeCensus c;
    c.threshold = threshold;
    c.gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < s.values.size(); ++i) {
        const double v = s.values(i);
        if (v < threshold) ++c.count;
        else c.gap = std::min(c.gap, v);
    }
    return c;
}

SplittingFit splitting_decay_fit(const ModelParams& p, double omega, const std::vector<int>& sizes) {
    if (sizes.size() < 4) throw ParameterError("splitting fit needs at least 4 sizes");
    SplittingFit fit;
    std::vector<double> xs, ys;
    for (int n : sizes) {
        ModelParams q = p;
        q.n_sites = n;
        const auto h = build_dynamical_matrix(q, Boundary::open);
        if (!stability_report(h).stable) {
            fit.all_stable = false;
            fit.warnings.push_back("size " + std::to_string(n) + " is dynamically unstable");
        }
        const auto s = singular_spectrum(h, omega, false);
        const double v = s.values(0);
        const double floor = std::numeric_limits<double>::epsilon() * s.values(s.values.size() - 1) * 2 * n;
        if (!(v > floor)) {
            fit.warnings.push_back("size " + std::to_string(n) + " smallest value below machine floor; excluded");
            continue;
        }
        fit.sizes_used.push_back(n);
        fit.smallest.push_back(v);
        xs.push_back(n);
        ys.push_back(std::log(v));
    }
    if (xs.size() < 2) throw NumericalError("fewer than two usable sizes in splitting fit");

    const double m = static_cast<double>(xs.size());
    double sx = 0, sy = 0;
    for (size_t i = 0; i < xs.size(); ++i) sx += xs[i], sy += ys[i];
    const double mx = sx / m, my = sy / m;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return fit;
}

namespace {

// Diagonal similarity scaling (radix 2, so exact). Directional chains have row and column
// norms that differ by orders of magnitude and the unbalanced eigenvalues drift.
CMat balance(CMat a) {
    const Eigen::Index n = a.rows();
    auto l1 = [](cplx z) { return std::abs(z.real()) + std::abs(z.imag()); };
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double c = 0, r = 0;
            for (Eigen::Index j = 0; j < n; ++j)
                if (j != i) {
                    c += l1(a(j, i));
                    r += l1(a(i, j));
                }
            if (c == 0 || r == 0) continue;
            const double s = c + r;
            double f = 1, g = r / 2;
            while (c < g) {
                f *= 2;
                c *= 4;
            }
            g = r * 2;
            while (c > g) {
                f /= 2;
                c /= 4;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
    return a;
}

}  // namespace

StabilityReport stability_report(const DynamicalMatrix& h, double epsilon) {
    Eigen::ComplexEigenSolver<CMat> es(balance(h.entries), false);
    if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed in stability report");
    StabilityReport r;
    r.spectrum = es.eigenvalues();
    r.max_im_eigenvalue = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < r.spectrum.size(); ++i)
        r.max_im_eigenvalue = std::max(r.max_im_eigenvalue, r.spectrum(i).imag());
    r.stable = r.max_im_eigenvalue < epsilon;
    return r;
}

}  // namespace topamp
