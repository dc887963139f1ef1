#include "topamp/reports.hpp"

#include <cmath>
#include <sstream>

#include "topamp/parallel.hpp"
#include "topamp/spectral.hpp"

namespace topamp {

std::vector<double> grid_values(const SweepSpec& s) {
    std::vector<double> v(s.count);
    for (int i = 0; i < s.count; ++i) v[i] = s.value(i);
    return v;
}

Table phase_diagram_table(const PhaseDiagramGrid& g) {
    Table t;
    t.header = {"x_name", "x_value", "y_name", "y_value", "w1_raw", "w1", "w_plus", "w_minus", "stable", "max_im_eig"};
    for (const auto& pt : g.points)
        t.add({g.axis_x.name, pt.x, g.axis_y.name, pt.y, pt.w1_raw, std::int64_t{pt.w1}, std::int64_t{pt.w_plus},
               std::int64_t{pt.w_minus}, std::int64_t{pt.stable ? 1 : 0}, pt.max_im_eig});
    return t;
}

Table spectrum_table(const ModelParams& p, Boundary boundary, const std::vector<double>& omegas, int threads) {
    const auto h = build_dynamical_matrix(p, boundary);
    auto spectra = parallel_map<RVec>(omegas.size(), threads, [&](size_t i) {
        return singular_spectrum(h, omegas[i]).values;
    });
    Table t;
    t.header = {"omega", "index", "singular_value"};
    for (size_t i = 0; i < omegas.size(); ++i)
        for (Eigen::Index n = 0; n < spectra[i].size(); ++n) t.add({omegas[i], std::int64_t{n}, spectra[i](n)});
    return t;
}

Table stability_table(const ModelParams& p, Boundary boundary, const std::vector<SweepSpec>& sweeps, int threads) {
    if (sweeps.size() > 2) throw ParameterError("at most two stability sweeps");
    size_t total = 1;
    for (const auto& s : sweeps) {
        if (!is_model_parameter(s.name)) throw ParameterError("cannot sweep '" + s.name + "' for stability");
        total *= s.count;
    }
    struct Row {
        std::vector<double> values;
        StabilityReport rep;
    };
    auto rows = parallel_map<Row>(total, threads, [&](size_t idx) {
        Row r;
        ModelParams q = p;
        size_t rest = idx;
        for (const auto& s : sweeps) {
            const double v = s.value(static_cast<int>(rest % s.count));
            rest /= s.count;
            set_parameter(q, s.name, v);
            r.values.push_back(v);
        }
        r.rep = stability_report(build_dynamical_matrix(q, boundary));
        return r;
    });
    Table t;
    for (const auto& s : sweeps) t.header.push_back(s.name);
    t.header.push_back("max_im_eig");
    t.header.push_back("stable");
    for (const auto& r : rows) {
        std::vector<Cell> row(r.values.begin(), r.values.end());
        row.push_back(r.rep.max_im_eigenvalue);
        row.push_back(std::int64_t{r.rep.stable ? 1 : 0});
        t.add(std::move(row));
    }
    return t;
}

Table ensemble_table(const EnsembleSpec& spec, const EnsembleSpectrum& e) {
    Table t;
    t.header = {"strength", "realization", "min_sv", "second_sv"};
    const double nan = std::nan("");
    for (const auto& r : e.realizations)
        t.add({spec.strength, std::int64_t{r.realization}, r.ok ? r.min_sv : nan, r.ok ? r.second_sv : nan});
    return t;
}

Table splitting_table(const SplittingCurve& c) {
    Table t;
    t.header = {"strength", "lowest_mean", "lowest_stderr", "second_mean", "second_stderr", "n_ok"};
    for (size_t i = 0; i < c.strengths.size(); ++i)
        t.add({c.strengths[i], c.lowest_mean[i], c.lowest_stderr[i], c.second_mean[i], c.second_stderr[i],
               std::int64_t{c.n_ok[i]}});
    return t;
}

Table amplifier_table(const ModelParams& p, const std::vector<int>& sites, const std::vector<double>& omegas,
                      int threads, const FiniteGreenOptions& opt) {
    const auto h = build_dynamical_matrix(p, Boundary::open);
    const auto pm = build_pump_matrix(p, Boundary::open);
    const auto frame = propagation_frame(p);
    auto pts = parallel_map<std::vector<AmplifierPoint>>(omegas.size(), threads, [&](size_t i) {
        try {
            const auto g = finite_green(h, omegas[i], frame, opt);
            std::vector<AmplifierPoint> out;
            for (int s : sites) out.push_back(added_noise(g, pm, p, s));
            return out;
        } catch (const NumericalError& e) {
            std::ostringstream os;
            os << "omega = " << format_number(omegas[i]) << ": " << e.what();
            throw NumericalError(os.str());
        }
    });
    Table t;
    t.header = {"omega", "site", "gain", "n_amp", "n_add", "n_add_capped_flag"};
    for (size_t i = 0; i < omegas.size(); ++i)
        for (const auto& a : pts[i])
            t.add({omegas[i], std::int64_t{a.site}, a.gain, a.n_amp, a.n_add_capped(), std::int64_t{a.capped() ? 1 : 0}});
    return t;
}

Table squeezing_table(const std::vector<SiteTrajectory>& traj, const std::vector<double>& omegas) {
    Table t;
    t.header = {"omega", "site", "theta", "var_x", "var_p", "mean_x_re", "mean_x_im", "mean_p_re", "mean_p_im", "class"};
    for (size_t i = 0; i < omegas.size(); ++i)
        for (const auto& st : traj) {
            const auto& tp = st.points[i];
            const auto& q = tp.state;
            t.add({q.omega, std::int64_t{q.site}, q.theta, q.var_x, q.var_p, q.mean_x.real(), q.mean_x.imag(),
                   q.mean_p.real(), q.mean_p.imag(), std::string(to_string(tp.cls))});
        }
    return t;
}

Table coherence_table(const ModelParams& p, const std::vector<double>& omegas, int threads) {
    struct Row {
        cplx zp, zm;
        bool ok = false;
    };
    auto rows = parallel_map<Row>(omegas.size(), threads, [&](size_t i) {
        Row r;
        try {
            const auto c = coherence_lengths(p, omegas[i]);
            r.zp = c.zeta_plus;
            r.zm = c.zeta_minus;
            r.ok = true;
        } catch (const NumericalError&) {
            r.zp = r.zm = cplx(std::nan(""), std::nan(""));
        }
        return r;
    });
    Table t;
    t.header = {"omega", "re_zeta_plus", "im_zeta_plus", "re_zeta_minus", "im_zeta_minus", "converged"};
    for (size_t i = 0; i < omegas.size(); ++i)
        t.add({omegas[i], rows[i].zp.real(), rows[i].zp.imag(), rows[i].zm.real(), rows[i].zm.imag(),
               std::int64_t{rows[i].ok ? 1 : 0}});
    return t;
}

}  // namespace topamp
