#include "topamp/model.hpp"

#include <cmath>

namespace topamp {

void ModelParams::validate() const {
    const double vals[] = {delta, hop, phi, g_s, g_c, gamma, pump, energy_unit};
    for (double v : vals)
        if (!std::isfinite(v)) throw ParameterError("non-finite model parameter");
    if (hop <= 0) throw ParameterError("hop must be > 0");
    if (gamma < 0) throw ParameterError("gamma must be >= 0");
    if (pump < 0) throw ParameterError("pump must be >= 0");
    if (n_sites < 2) throw ParameterError("n_sites must be >= 2");
}

ModelParams ModelParams::normalized() const {
    validate();
    ModelParams q = *this;
    const double s = hop;
    q.delta /= s;
    q.g_s /= s;
    q.g_c /= s;
    q.gamma /= s;
    q.pump /= s;
    q.hop = 1.0;
    q.energy_unit = energy_unit * s;
    return q;
}

ModelParams canonical_params() { return ModelParams{}; }

ModelParams double_hatano_nelson_params() {
    ModelParams p;
    p.g_s = 0.1;
    p.g_c = 0.1;
    p.pump = 0.75;
    p.gamma = 4.0;
    return p;
}

const char* to_string(Boundary b) { return b == Boundary::open ? "open" : "periodic"; }

Boundary boundary_from_string(const std::string& s) {
    if (s == "open") return Boundary::open;
    if (s == "periodic") return Boundary::periodic;
    throw ParameterError("unknown boundary '" + s + "'");
}

namespace {

// neighbour list (j, l) with j = l + 1, wrapped for periodic chains
std::vector<std::pair<int, int>> lower_bonds(int n, Boundary b) {
    std::vector<std::pair<int, int>> out;
    for (int l = 0; l + 1 < n; ++l) out.emplace_back(l + 1, l);
    if (b == Boundary::periodic) out.emplace_back(0, n - 1);
    return out;
}

}  // namespace

DynamicalMatrix build_dynamical_matrix(const ModelParams& p, Boundary boundary,
                                       const std::optional<DisorderOffsets>& disorder) {
    p.validate();
    const int n = p.n_sites;
    if (disorder && static_cast<int>(disorder->offsets.size()) != n)
        throw ParameterError("disorder length " + std::to_string(disorder->offsets.size()) +
                             " does not match n_sites " + std::to_string(n));

    std::vector<double> w(n, 0.0);
    DisorderChannel ch = DisorderChannel::onsite;
    if (disorder) {
        w = disorder->offsets;
        ch = disorder->channel;
        for (double x : w)
            if (!std::isfinite(x)) throw ParameterError("non-finite disorder offset");
    }
    auto site = [&](DisorderChannel c, int j) { return c == ch ? w[j] : 0.0; };

    CMat jm = CMat::Zero(n, n);  // coherent part, Hermitian
    RMat gam = RMat::Zero(n, n);
    RMat k = RMat::Zero(n, n);
    for (int j = 0; j < n; ++j) {
        jm(j, j) = p.delta + site(DisorderChannel::onsite, j);
        const double g = p.gamma + site(DisorderChannel::loss, j);
        gam(j, j) = (4 * p.pump - g) / 2;
        k(j, j) = p.g_s + site(DisorderChannel::squeezing, j);
    }
    const cplx e = std::polar(1.0, p.phi);
    for (auto [j, l] : lower_bonds(n, boundary)) {
        // bond disorder is attached to the lower site index of the pair
        const int b = (j == 0 && l == n - 1) ? n - 1 : l;
        const double t = p.hop + site(DisorderChannel::hopping, b);
        jm(j, l) += t * std::conj(e);
        jm(l, j) += t * e;
        gam(j, l) += p.pump;
        gam(l, j) += p.pump;
        k(j, l) += p.g_c;
        k(l, j) += p.g_c;
    }

    const CMat a = jm + I1 * gam.cast<cplx>();
    DynamicalMatrix h;
    h.entries.resize(2 * n, 2 * n);
    h.entries.topLeftCorner(n, n) = a;
    h.entries.topRightCorner(n, n) = k.cast<cplx>();
    h.entries.bottomLeftCorner(n, n) = -k.cast<cplx>();
    h.entries.bottomRightCorner(n, n) = -a.conjugate();
    h.boundary = boundary;
    h.params = p;
    h.disorder = disorder;
    return h;
}

RMat build_pump_matrix(const ModelParams& p, Boundary boundary) {
    p.validate();
    const int n = p.n_sites;
    RMat m = RMat::Zero(n, n);
    for (int j = 0; j < n; ++j) m(j, j) = 4 * p.pump;
    for (auto [j, l] : lower_bonds(n, boundary)) {
        m(j, l) += 2 * p.pump;
        m(l, j) += 2 * p.pump;
    }
    return m;
}

PumpDecomposition pump_decomposition(const RMat& pm) {
    if (pm.rows() != pm.cols()) throw ParameterError("pump matrix must be square");
    if ((pm - pm.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw ParameterError("pump matrix must be symmetric");
    Eigen::SelfAdjointEigenSolver<RMat> es(pm);
    if (es.info() != Eigen::Success) throw NumericalError("pump eigensolver failed");
    const Eigen::Index n = pm.rows();
    PumpDecomposition d;
    d.rates.resize(n);
    d.rotation.resize(n, n);
    for (Eigen::Index m = 0; m < n; ++m) {
        const Eigen::Index src = n - 1 - m;
        d.rates(m) = es.eigenvalues()(src);
        d.rotation.row(m) = es.eigenvectors().col(src).transpose().cast<cplx>();
    }
    d.negative_rates = n > 0 && d.rates.minCoeff() < -1e-10;
    return d;
}

BlochMatrix bloch_matrix(const ModelParams& p, double k) {
    BlochMatrix b;
    b.k = k;
    const double c2 = std::cos(k / 2);
    b.f0 = -2 * p.hop * std::sin(k) * std::sin(p.phi) - I1 * (p.gamma / 2) + I1 * (4 * p.pump * c2 * c2);
    b.fx = 0.0;
    b.fy = I1 * (p.g_s + 2 * p.g_c * std::cos(k));
    b.fz = p.delta + 2 * p.hop * std::cos(k) * std::cos(p.phi);
    b.matrix << b.f0 + b.fz, -I1 * b.fy, I1 * b.fy, b.f0 - b.fz;
    return b;
}

CMat2 bloch_matrix_derivative(const ModelParams& p, double k) {
    const cplx d0 = -2 * p.hop * std::cos(k) * std::sin(p.phi) - I1 * (2 * p.pump * std::sin(k));
    const cplx dy = -I1 * (2 * p.g_c * std::sin(k));
    const cplx dz = -2 * p.hop * std::sin(k) * std::cos(p.phi);
    CMat2 m;
    m << d0 + dz, -I1 * dy, I1 * dy, d0 - dz;
    return m;
}

DoubledMatrix build_doubled_matrix(const CMat& h, double omega) {
    if (!std::isfinite(omega)) throw ParameterError("omega must be finite");
    if (h.rows() != h.cols()) throw ParameterError("matrix must be square");
    const Eigen::Index d = h.rows();
    CMat m = omega * CMat::Identity(d, d) - h;
    DoubledMatrix out;
    out.omega = omega;
    out.entries = CMat::Zero(2 * d, 2 * d);
    out.entries.topRightCorner(d, d) = m;
    out.entries.bottomLeftCorner(d, d) = m.adjoint();
    return out;
}

CMat tau_z(Eigen::Index dim) {
    CMat t = CMat::Identity(dim, dim);
    t.bottomRightCorner(dim / 2, dim / 2) *= -1.0;
    return t;
}

bool is_model_parameter(const std::string& name) {
    static const char* names[] = {"delta", "hop", "phi", "g_s", "g_c", "g", "gamma", "pump", "n_sites"};
    for (auto* n : names)
        if (name == n) return true;
    return false;
}

void set_parameter(ModelParams& p, const std::string& name, double v) {
    if (name == "delta") p.delta = v;
    else if (name == "hop") p.hop = v;
    else if (name == "phi") p.phi = v;
    else if (name == "g_s") p.g_s = v;
    else if (name == "g_c") p.g_c = v;
    else if (name == "g") p.g_s = p.g_c = v;
    else if (name == "gamma") p.gamma = v;
    else if (name == "pump") p.pump = v;
    else if (name == "n_sites") {
        if (v != std::floor(v)) throw ParameterError("n_sites must be an integer");
        p.n_sites = static_cast<int>(v);
    } else
        throw ParameterError("unknown parameter '" + name + "'");
}

}  // namespace topamp
