#include "topamp/floquet.hpp"

#include <cmath>
#include <sstream>

namespace topamp {

std::vector<double> bessel_sequence(double x, int n_max) {
    if (n_max < 0) throw ParameterError("n_max must be >= 0");
    if (!std::isfinite(x)) throw ParameterError("Bessel argument must be finite");
    std::vector<double> out(n_max + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const double ax = std::abs(x);
    int m = static_cast<int>(std::max<double>(n_max, ax)) + 20 + static_cast<int>(10 * std::sqrt(std::max(ax, 1.0)));
    m += m % 2;
    double jp1 = 0.0, j = 1e-30, norm = 0.0;
    for (int k = m; k >= 1; --k) {
        const double jm1 = (2.0 * k / ax) * j - jp1;
        jp1 = j;
        j = jm1;
        if (k - 1 <= n_max) out[k - 1] = j;
        if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2 * j;
        if (std::abs(j) > 1e250) {
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            for (auto& v : out) v *= 1e-250;
        }
    }
    norm += j;  // j now holds the unnormalised J_0
    for (auto& v : out) v /= norm;
    if (x < 0)
        for (int n = 1; n <= n_max; n += 2) out[n] = -out[n];
    return out;
}

double bessel_j(int n, double x) {
    const int an = std::abs(n);
    const double v = bessel_sequence(x, an)[an];
    return (n < 0 && an % 2) ? -v : v;
}

void LocalDriveSpec::validate() const {
    if (!std::isfinite(j_c) || !std::isfinite(eta) || !std::isfinite(delta_phi))
        throw ParameterError("drive parameters must be finite");
    if (n_max < 1) throw ParameterError("n_max must be >= 1");
}

void CouplingDriveSpec::validate() const {
    for (double v : {a0, a1, a2, a3, phi_d})
        if (!std::isfinite(v)) throw ParameterError("drive amplitudes must be finite");
}

namespace {

constexpr double kTail = 1e-15;

bool tail_ok(const std::vector<double>& jn, int n_max) { return std::abs(jn[n_max + 1]) < kTail; }

cplx f_sum(const std::vector<double>& jn, int n_max, double delta_phi) {
    auto J = [&](int n) { return (n < 0 && (-n) % 2) ? -jn[-n] : jn[std::abs(n)]; };
    cplx acc = 0.0;
    for (int n = -n_max - 1; n <= n_max; ++n) acc += J(-n - 1) * J(n) * std::polar(1.0, -(n + 0.5) * delta_phi);
    return acc;
}

}  // namespace

double f_function(double eta, double delta_phi, int n_max) {
    if (n_max < 1) throw ParameterError("n_max must be >= 1");
    const auto jn = bessel_sequence(eta, n_max + 1);
    if (!tail_ok(jn, n_max)) {
        std::ostringstream os;
        os << "Bessel tail |J_" << n_max + 1 << "(" << eta << ")| = " << std::abs(jn[n_max + 1])
           << " exceeds bound; increase n_max";
        throw ParameterError(os.str());
    }
    const cplx f = f_sum(jn, n_max, delta_phi);
    if (std::abs(f.imag()) > 1e-12) throw NumericalError("F(eta, delta_phi) has an imaginary residue");
    return f.real();
}

void DriveMap::apply(ModelParams& p) const {
    p.hop = hop;
    p.phi = phi;
    p.g_s = g_s;
    p.g_c = g_c;
}

namespace {

double wrap_angle(double a) {
    a = std::remainder(a, 2 * kPi);
    if (a <= -kPi) a += 2 * kPi;
    return a;
}

void absorb_sign(DriveMap& m) {
    if (m.raw_hop == 0.0) throw ParameterError("effective hopping vanishes for this drive");
    if (m.raw_hop < 0) {
        m.hop = -m.raw_hop;
        m.phi = wrap_angle(m.raw_phi + kPi);
        m.gauge_note = "negative hopping absorbed as phi -> phi + pi";
    } else {
        m.hop = m.raw_hop;
        m.phi = m.raw_phi;
    }
}

}  // namespace

DriveMap local_drive_map(const LocalDriveSpec& spec) {
    spec.validate();
    int n_max = spec.n_max;
    std::vector<double> jn = bessel_sequence(spec.eta, n_max + 1);
    while (!tail_ok(jn, n_max)) {
        n_max *= 2;
        if (n_max > 4096) throw NumericalError("Bessel truncation did not reach the tail bound");
        jn = bessel_sequence(spec.eta, n_max + 1);
    }

    cplx s = 0.0;
    for (int n = -n_max; n <= n_max; ++n) s += jn[std::abs(n)] * jn[std::abs(n)] * std::polar(1.0, -n * spec.delta_phi);
    const cplx f = f_sum(jn, n_max, spec.delta_phi);

    DriveMap m;
    m.n_max_used = n_max;
    m.imag_residue = std::max(std::abs(s.imag()), std::abs(f.imag())) * std::abs(spec.j_c);
    if (m.imag_residue > 1e-12) throw NumericalError("drive map coefficients have an imaginary residue");
    m.raw_hop = -spec.j_c * s.real();
    m.raw_phi = spec.delta_phi / 2;
    m.g_s = spec.j_c * bessel_j(-1, 2 * spec.eta);
    m.g_c = -spec.j_c * f.real();
    m.gauge_note = "local phases absorbed by a gauge transformation; gamma and pump passed through unchanged";
    absorb_sign(m);
    if (spec.carrier && *spec.carrier < 10 * std::abs(spec.j_c))
        m.warnings.push_back("carrier frequency is not much larger than J_c; rotating-wave terms may matter");
    return m;
}

DriveMap coupling_drive_map(const CouplingDriveSpec& spec) {
    spec.validate();
    DriveMap m;
    m.raw_hop = spec.a3 / 2;
    m.raw_phi = spec.phi_d;
    m.g_s = spec.a1 / 2;
    m.g_c = spec.a2 / 2;
    m.hop = m.raw_hop;
    m.phi = m.raw_phi;
    if (m.raw_hop < 0) absorb_sign(m);
    if (spec.detuning) {
        const double amax = std::max({std::abs(spec.a0), std::abs(spec.a1), std::abs(spec.a2), std::abs(spec.a3)});
        if (*spec.detuning < 10 * amax)
            m.warnings.push_back("tone spacing is not much larger than the drive amplitudes");
    }
    return m;
}

}  // namespace topamp
