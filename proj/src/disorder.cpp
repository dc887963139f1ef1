#include "topamp/disorder.hpp"

#include <algorithm>
#include <cmath>

#include "topamp/parallel.hpp"
#include "topamp/spectral.hpp"

namespace topamp {

namespace {

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

}  // namespace

double counter_uniform(std::uint64_t seed, std::uint64_t realization, std::uint64_t site) {
    std::uint64_t x = mix64(seed + kGolden);
    x = mix64(x ^ (realization + 1) * kGolden);
    x = mix64(x ^ (site + 1) * 0xd1b54a32d192ed03ULL);
    return static_cast<double>(x >> 11) * 0x1.0p-53;
}

void EnsembleSpec::validate() const {
    base_params.validate();
    if (n_realizations < 1) throw ParameterError("n_realizations must be >= 1");
    if (!(strength >= 0) || !std::isfinite(strength)) throw ParameterError("disorder strength must be >= 0");
    if (!std::isfinite(omega)) throw ParameterError("omega must be finite");
}

DisorderOffsets sample_offsets(const EnsembleSpec& spec, int realization) {
    spec.validate();
    if (realization < 0 || realization >= spec.n_realizations)
        throw ParameterError("realization index out of range");
    DisorderOffsets d;
    d.seed = spec.seed;
    d.realization_index = realization;
    d.strength = spec.strength;
    d.channel = spec.channel;
    d.offsets.resize(spec.base_params.n_sites);
    for (int j = 0; j < spec.base_params.n_sites; ++j)
        d.offsets[j] = spec.strength * (2 * counter_uniform(spec.seed, realization, j) - 1);
    return d;
}

EnsembleSpectrum ensemble_spectrum(const EnsembleSpec& spec, int threads) {
    spec.validate();
    struct Raw {
        RealizationResult r;
        RVec values;
    };
    auto raws = parallel_map<Raw>(spec.n_realizations, threads, [&](size_t i) {
        Raw out;
        out.r.realization = static_cast<int>(i);
        try {
            const auto h = build_dynamical_matrix(spec.base_params, Boundary::open, sample_offsets(spec, static_cast<int>(i)));
            const auto s = singular_spectrum(h, spec.omega);
            out.values = s.values;
            out.r.min_sv = s.values(0);
            out.r.second_sv = s.values(1);
            out.r.ok = true;
        } catch (const NumericalError& e) {
            out.r.error = e.what();
        }
        return out;
    });

    EnsembleSpectrum e;
    e.mean_values = RVec::Zero(2 * spec.base_params.n_sites);
    int ok = 0;
    for (auto& raw : raws) {
        e.realizations.push_back(raw.r);
        if (raw.r.ok) {
            e.mean_values += raw.values;
            ++ok;
        } else {
            ++e.n_failed;
        }
    }
    if (ok > 0) e.mean_values /= ok;
    return e;
}

SplittingCurve splitting_curve(const ModelParams& base, double omega, const std::vector<double>& strengths,
                               int n_realizations, std::uint64_t seed, int threads) {
    if (!std::is_sorted(strengths.begin(), strengths.end()))
        throw ParameterError("disorder strengths must be sorted ascending");
    SplittingCurve c;
    for (double w : strengths) {
        EnsembleSpec spec;
        spec.base_params = base;
        spec.strength = w;
        spec.n_realizations = n_realizations;
        spec.seed = seed;
        spec.omega = omega;
        const auto e = ensemble_spectrum(spec, threads);

        std::vector<double> lo, hi;
        for (auto& r : e.realizations)
            if (r.ok) {
                lo.push_back(r.min_sv);
                hi.push_back(r.second_sv);
            }
        auto stats = [](const std::vector<double>& v) {
            if (v.empty()) return std::pair{std::nan(""), std::nan("")};
            double m = 0;
            for (double x : v) m += x;
            m /= v.size();
            if (v.size() < 2) return std::pair{m, 0.0};
            double s2 = 0;
            for (double x : v) s2 += (x - m) * (x - m);
            s2 /= (v.size() - 1);
            return std::pair{m, std::sqrt(s2 / v.size())};
        };
        auto [lm, ls] = stats(lo);
        auto [sm, ss] = stats(hi);
        c.strengths.push_back(w);
        c.lowest_mean.push_back(lm);
        c.lowest_stderr.push_back(ls);
        c.second_mean.push_back(sm);
        c.second_stderr.push_back(ss);
        c.n_ok.push_back(static_cast<int>(lo.size()));
    }
    return c;
}

}  // namespace topamp
