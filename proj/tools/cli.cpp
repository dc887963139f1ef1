#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "topamp/acceptance.hpp"
#include "topamp/disorder.hpp"
#include "topamp/floquet.hpp"
#include "topamp/parallel.hpp"
#include "topamp/reports.hpp"
#include "topamp/spectral.hpp"

namespace topamp::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

struct Common {
    std::string config;
    std::vector<std::string> sets;
    std::string out;
    std::string manifest;
    std::string format = "csv";
    std::string boundary;
    int threads = 0;
};

void add_common(CLI::App* sub, Common& c, bool model = true) {
    if (model) {
        sub->add_option("--config", c.config, "model configuration JSON")->check(CLI::ExistingFile);
        sub->add_option("--set", c.sets, "override a model parameter, name=value (repeatable)");
        sub->add_option("--boundary", c.boundary, "open or periodic")->check(CLI::IsMember({"open", "periodic"}));
    }
    sub->add_option("--out", c.out, "output file");
    sub->add_option("--manifest", c.manifest, "manifest path (default: manifest.json next to the output)");
    sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", c.threads, "worker threads (default: TWPA_THREADS or all cores)")
        ->check(CLI::NonNegativeNumber);
}

double number(const json& v, const std::string& key) {
    if (!v.is_number()) throw ParameterError("config key '" + key + "' must be a number");
    return v.get<double>();
}

struct Model {
    ModelParams params;
    Boundary boundary = Boundary::open;
};

Model load_model(const Common& c) {
    Model m;
    if (!c.config.empty()) {
        std::ifstream in(c.config);
        json j;
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ParameterError("cannot parse " + c.config + ": " + e.what());
        }
        if (!j.is_object()) throw ParameterError("config must be a JSON object");
        for (auto& [key, v] : j.items()) {
            if (!key.empty() && key[0] == '_') continue;  // metadata blocks
            if (key == "boundary") {
                if (!v.is_string()) throw ParameterError("boundary must be a string");
                m.boundary = boundary_from_string(v.get<std::string>());
            } else if (key == "g" || !is_model_parameter(key)) {
                throw ParameterError("unknown config key '" + key + "'");
            } else {
                set_parameter(m.params, key, number(v, key));
            }
        }
    }
    for (const auto& s : c.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ParameterError("--set expects name=value, got '" + s + "'");
        const std::string name = s.substr(0, eq);
        double v;
        try {
            size_t pos = 0;
            v = std::stod(s.substr(eq + 1), &pos);
            if (pos != s.size() - eq - 1) throw std::invalid_argument(s);
        } catch (const std::exception&) {
            throw ParameterError("bad value in --set " + s);
        }
        set_parameter(m.params, name, v);
    }
    if (!c.boundary.empty()) m.boundary = boundary_from_string(c.boundary);
    m.params = m.params.normalized();
    return m;
}

json params_json(const Model& m) {
    const auto& p = m.params;
    return json{{"delta", p.delta}, {"hop", p.hop},     {"phi", p.phi},   {"g_s", p.g_s},
                {"g_c", p.g_c},     {"gamma", p.gamma}, {"pump", p.pump}, {"n_sites", p.n_sites},
                {"boundary", to_string(m.boundary)},    {"energy_unit", p.energy_unit}};
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() == 1) return {SweepSpec::parse("omega:" + text + ":" + text + ":1").start};
    if (parts.size() != 3) throw ParameterError("grid must be start:stop:count, got '" + text + "'");
    return grid_values(SweepSpec::parse("omega:" + text));
}

json grid_json(const std::string& text) { return text; }

std::string default_out(const std::string& base, const Common& c) {
    return c.out.empty() ? base + (c.format == "json" ? ".json" : ".csv") : c.out;
}

json table_json(const Table& t) {
    json rows = json::array();
    for (const auto& r : t.rows) {
        json o = json::object();
        for (size_t i = 0; i < r.size(); ++i) {
            std::visit([&](const auto& v) { o[t.header[i]] = v; }, r[i]);
        }
        rows.push_back(std::move(o));
    }
    return rows;
}

void write_file(const std::string& path, const std::string& text) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

struct Run {
    std::string subcommand;
    std::vector<std::string> argv;
    Common* common = nullptr;
    json manifest = json::object();
    std::vector<std::string> outputs;
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    void emit(const Table& t, const std::string& base) {
        const auto path = default_out(base, *common);
        write_file(path, common->format == "json" ? table_json(t).dump(1) + "\n" : t.to_csv());
        outputs.push_back(path);
    }

    std::string manifest_path() const {
        if (!common->manifest.empty()) return common->manifest;
        fs::path base = outputs.empty() ? fs::path(common->out) : fs::path(outputs.front());
        return (base.has_parent_path() ? base.parent_path() / "manifest.json" : fs::path("manifest.json")).string();
    }

    void finish(const std::string& status, const std::string& message = {}) {
        json m;
        m["tool"] = "topamp";
        m["version"] = kVersion;
        m["subcommand"] = subcommand;
        m["argv"] = argv;
        m["threads"] = resolve_threads(common->threads);
        for (auto& [k, v] : manifest.items()) m[k] = v;
        m["outputs"] = outputs;
        m["status"] = status;
        if (!message.empty()) m["message"] = message;
        m["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_file(manifest_path(), m.dump(2) + "\n");
    }
};

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Topological amplifier analysis toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Common c;
    Run r;
    r.common = &c;
    for (int i = 0; i < argc; ++i) r.argv.emplace_back(argv[i]);

    // phase-diagram
    std::string sweep_x, sweep_y;
    int nk = kDefaultNk;
    double omega = 0.0;
    auto* pd = app.add_subcommand("phase-diagram", "winding numbers and stability over a 2D parameter grid");
    add_common(pd, c);
    pd->add_option("--sweep-x", sweep_x, "name:start:stop:count")->required();
    pd->add_option("--sweep-y", sweep_y, "name:start:stop:count")->required();
    pd->add_option("--nk", nk, "momentum grid size")->check(CLI::Range(64, kMaxNk));
    pd->add_option("--omega", omega, "frequency when omega is not swept");

    // spectrum
    std::string omega_grid = "0";
    double threshold = kZeroModeThreshold;
    auto* sp = app.add_subcommand("spectrum", "singular values of omega - H");
    add_common(sp, c);
    sp->add_option("--omega-grid", omega_grid, "start:stop:count or a single value");
    sp->add_option("--threshold", threshold, "zero-mode threshold")->check(CLI::PositiveNumber);

    // stability
    std::vector<std::string> sweeps;
    auto* st = app.add_subcommand("stability", "largest imaginary eigenvalue over parameter sweeps");
    add_common(st, c);
    st->add_option("--sweep", sweeps, "name:start:stop:count (up to two)");

    // disorder
    double strength = 0.1;
    int realizations = 100;
    std::uint64_t seed = 0;
    auto* di = app.add_subcommand("disorder", "on-site disorder ensemble");
    add_common(di, c);
    di->add_option("--strength", strength, "disorder strength w/J")->check(CLI::NonNegativeNumber);
    di->add_option("--realizations", realizations)->check(CLI::PositiveNumber);
    di->add_option("--seed", seed);
    di->add_option("--omega", omega);

    // splitting
    std::string strengths = "0,0.05,0.1,0.15,0.2";
    auto* sl = app.add_subcommand("splitting", "smallest singular values versus disorder strength");
    add_common(sl, c);
    sl->add_option("--strengths", strengths, "comma list or start:stop:count");
    sl->add_option("--realizations", realizations)->check(CLI::PositiveNumber);
    sl->add_option("--seed", seed);
    sl->add_option("--omega", omega);

    // gain / noise
    std::vector<int> sites;
    double max_condition = 1e12;
    auto* ga = app.add_subcommand("gain", "gain and added noise per site and frequency");
    auto* no = app.add_subcommand("noise", "added noise per site and frequency");
    for (auto* sub : {ga, no}) {
        add_common(sub, c);
        sub->add_option("--site", sites, "amplifier site(s), default the last")->delimiter(',');
        sub->add_option("--omega-grid", omega_grid, "start:stop:count or a single value");
        sub->add_option("--max-condition", max_condition, "largest accepted condition number")
            ->check(CLI::PositiveNumber);
    }

    // squeezing
    double theta = kPi / 4;
    auto* sq = app.add_subcommand("squeezing", "output quadrature variances");
    add_common(sq, c);
    sq->add_option("--site", sites, "site(s), default the last")->delimiter(',');
    sq->add_option("--omega-grid", omega_grid, "start:stop:count or a single value");
    sq->add_option("--theta", theta, "quadrature angle");

    // coherence
    auto* co = app.add_subcommand("coherence", "inverse coherence lengths of the half-infinite chain");
    add_common(co, c);
    co->add_option("--omega-grid", omega_grid, "start:stop:count or a single value");

    // floquet-map
    std::string scheme = "local";
    LocalDriveSpec local;
    CouplingDriveSpec coupling;
    double carrier = NAN, detuning = NAN;
    auto* fm = app.add_subcommand("floquet-map", "effective model parameters of a drive scheme");
    add_common(fm, c, false);
    fm->add_option("--scheme", scheme)->check(CLI::IsMember({"local", "coupling"}));
    fm->add_option("--jc", local.j_c, "bare coupling");
    fm->add_option("--eta", local.eta, "drive strength");
    fm->add_option("--dphi", local.delta_phi, "phase gradient");
    fm->add_option("--nmax", local.n_max, "Bessel truncation")->check(CLI::PositiveNumber);
    fm->add_option("--carrier", carrier, "resonator drive frequency (warnings only)");
    fm->add_option("--a0", coupling.a0);
    fm->add_option("--a1", coupling.a1);
    fm->add_option("--a2", coupling.a2);
    fm->add_option("--a3", coupling.a3);
    fm->add_option("--phid", coupling.phi_d);
    fm->add_option("--detuning", detuning, "tone spacing (warnings only)");

    // verify
    std::vector<int> criteria;
    auto* ve = app.add_subcommand("verify", "run the built-in acceptance checks");
    add_common(ve, c, false);
    ve->add_option("--criteria", criteria, "subset of criteria")->delimiter(',')->check(CLI::Range(1, kCriterionCount));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    r.subcommand = sub->get_name();
    const int threads = c.threads;

    try {
        if (sub == pd) {
            const auto m = load_model(c);
            const auto sx = SweepSpec::parse(sweep_x), sy = SweepSpec::parse(sweep_y);
            const auto grid = phase_diagram(m.params, sx, sy, nk, omega, threads);
            r.manifest["params"] = params_json(m);
            r.manifest["grids"] = {{"sweep_x", sweep_x}, {"sweep_y", sweep_y}, {"n_k", nk}, {"omega", omega}};
            json errs = json::array();
            int count = 0;
            for (const auto& pt : grid.points)
                if (!pt.error.empty()) {
                    if (++count <= 50) errs.push_back({{"x", pt.x}, {"y", pt.y}, {"error", pt.error}});
                }
            r.manifest["point_errors"] = {{"count", count}, {"first", errs}};
            r.emit(phase_diagram_table(grid), "phase_diagram");
        } else if (sub == sp) {
            const auto m = load_model(c);
            const auto ws = parse_grid(omega_grid);
            const auto t = spectrum_table(m.params, m.boundary, ws, threads);
            json census = json::array();
            for (size_t i = 0; i < ws.size(); ++i) {
                const auto s = singular_spectrum(build_dynamical_matrix(m.params, m.boundary), ws[i], false);
                const auto z = zero_mode_census(s, threshold);
                census.push_back({{"omega", ws[i]}, {"count", z.count}, {"gap", z.gap}});
            }
            r.manifest["params"] = params_json(m);
            r.manifest["grids"] = {{"omega_grid", omega_grid}};
            r.manifest["zero_mode_threshold"] = threshold;
            r.manifest["census"] = census;
            r.emit(t, "spectrum");
        } else if (sub == st) {
            const auto m = load_model(c);
            std::vector<SweepSpec> specs;
            for (const auto& s : sweeps) specs.push_back(SweepSpec::parse(s));
            r.manifest["params"] = params_json(m);
            r.manifest["grids"] = {{"sweeps", sweeps}};
            r.manifest["stability_epsilon"] = kStabilityEpsilon;
            r.emit(stability_table(m.params, m.boundary, specs, threads), "stability");
        } else if (sub == di) {
            const auto m = load_model(c);
            EnsembleSpec spec;
            spec.base_params = m.params;
            spec.strength = strength;
            spec.n_realizations = realizations;
            spec.seed = seed;
            spec.omega = omega;
            const auto e = ensemble_spectrum(spec, threads);
            r.manifest["params"] = params_json(m);
            r.manifest["seed"] = seed;
            r.manifest["grids"] = {{"strength", strength}, {"realizations", realizations}, {"omega", omega}};
            r.manifest["point_errors"] = {{"count", e.n_failed}};
            json mean = json::array();
            for (Eigen::Index i = 0; i < e.mean_values.size(); ++i) mean.push_back(e.mean_values(i));
            r.manifest["mean_sorted_spectrum"] = mean;
            r.emit(ensemble_table(spec, e), "ensemble");
        } else if (sub == sl) {
            const auto m = load_model(c);
            std::vector<double> ws;
            if (strengths.find(':') != std::string::npos) {
                ws = parse_grid(strengths);
            } else {
                std::stringstream ss(strengths);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    try {
                        ws.push_back(std::stod(item));
                    } catch (const std::exception&) {
                        throw ParameterError("bad strength '" + item + "'");
                    }
                }
            }
            const auto curve = splitting_curve(m.params, omega, ws, realizations, seed, threads);
            r.manifest["params"] = params_json(m);
            r.manifest["seed"] = seed;
            r.manifest["grids"] = {{"strengths", ws}, {"realizations", realizations}, {"omega", omega}};
            int failed = 0;
            for (int ok : curve.n_ok) failed += realizations - ok;
            r.manifest["point_errors"] = {{"count", failed}};
            r.emit(splitting_table(curve), "splitting");
        } else if (sub == ga || sub == no) {
            const auto m = load_model(c);
            if (sites.empty()) sites = {m.params.n_sites - 1};
            FiniteGreenOptions opt;
            opt.max_condition = max_condition;
            r.manifest["params"] = params_json(m);
            r.manifest["grids"] = {{"omega_grid", omega_grid}, {"sites", sites}};
            r.manifest["max_condition"] = max_condition;
            r.manifest["input_edge"] = propagation_frame(m.params).edge == InputEdge::left ? "left" : "right";
            r.emit(amplifier_table(m.params, sites, parse_grid(omega_grid), threads, opt), "amplifier");
        } else if (sub == sq) {
            const auto m = load_model(c);
            if (sites.empty()) sites = {m.params.n_sites - 1};
            const auto ws = parse_grid(omega_grid);
            const auto traj = squeezing_trajectory(m.params, sites, ws, theta, threads);
            r.manifest["params"] = params_json(m);
            r.manifest["grids"] = {{"omega_grid", omega_grid}, {"sites", sites}, {"theta", theta}};
            r.emit(squeezing_table(traj, ws), "squeezing");
        } else if (sub == co) {
            const auto m = load_model(c);
            const auto t = coherence_table(m.params, parse_grid(omega_grid), threads);
            int failed = 0;
            for (const auto& row : t.rows) failed += std::get<std::int64_t>(row.back()) == 0;
            r.manifest["params"] = params_json(m);
            r.manifest["grids"] = {{"omega_grid", omega_grid}};
            r.manifest["point_errors"] = {{"count", failed}};
            r.emit(t, "coherence");
        } else if (sub == fm) {
            DriveMap map;
            json spec;
            if (scheme == "local") {
                if (!std::isnan(carrier)) local.carrier = carrier;
                map = local_drive_map(local);
                spec = {{"scheme", "local"}, {"jc", local.j_c}, {"eta", local.eta}, {"dphi", local.delta_phi},
                        {"nmax", map.n_max_used}};
            } else {
                if (!std::isnan(detuning)) coupling.detuning = detuning;
                map = coupling_drive_map(coupling);
                spec = {{"scheme", "coupling"}, {"a0", coupling.a0}, {"a1", coupling.a1}, {"a2", coupling.a2},
                        {"a3", coupling.a3},      {"phid", coupling.phi_d}};
            }
            json frag = {{"hop", map.hop}, {"phi", map.phi}, {"g_s", map.g_s}, {"g_c", map.g_c}};
            frag["_drive"] = {{"spec", spec},
                              {"raw_hop", map.raw_hop},
                              {"raw_phi", map.raw_phi},
                              {"imag_residue", map.imag_residue},
                              {"gauge_note", map.gauge_note},
                              {"warnings", map.warnings}};
            const std::string path = c.out.empty() ? "params.json" : c.out;
            write_file(path, frag.dump(2) + "\n");
            r.outputs.push_back(path);
            r.manifest["drive"] = spec;
            for (const auto& w : map.warnings) std::cerr << "warning: " << w << "\n";
        } else if (sub == ve) {
            AcceptanceOptions opt;
            opt.threads = threads;
            opt.only = criteria;
            bool all = true;
            json res = json::array();
            run_acceptance(opt, [&](const CriterionResult& cr) {
                std::cout << format_result(cr) << std::endl;
                all = all && cr.passed;
                res.push_back({{"id", cr.id}, {"name", cr.name}, {"passed", cr.passed}, {"detail", cr.detail},
                               {"seconds", cr.seconds}});
            });
            if (!c.out.empty()) {
                write_file(c.out, res.dump(2) + "\n");
                r.outputs.push_back(c.out);
            }
            r.manifest["criteria"] = res;
            if (!c.out.empty() || !c.manifest.empty()) r.finish(all ? "ok" : "failed");
            return all ? 0 : 1;
        }
        r.finish("ok");
        return 0;
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        try {
            r.finish("error", e.what());
        } catch (...) {
        }
        return 1;
    }
}

}  // namespace topamp::cli
