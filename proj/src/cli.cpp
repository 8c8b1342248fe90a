#include "zak/cli.hpp"

#include "zak/csv.hpp"
#include "zak/errors.hpp"
#include "zak/lattice_dynamics.hpp"
#include "zak/spectral.hpp"
#include "zak/sweep.hpp"
#include "zak/wannier_stark.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>

namespace zak {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Flags {
    std::string config;
    std::optional<double> omega;
    std::optional<double> lambda;
    std::optional<double> force;
    std::string out = ".";
    std::optional<int> threads;
    std::optional<double> tol;
};

json read_config_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_json_text(text, path);
}

// Flags override the file; the merged document goes through the usual validation.
SweepConfig merged_config(json j, const Flags& f) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    if (f.omega) j["omega"] = *f.omega;
    if (f.force) j["force"] = *f.force;
    if (f.lambda) {
        if (!j.contains("model") || !j["model"].is_object()) throw ConfigError("config: missing 'model'");
        j["model"]["lambda"] = *f.lambda;
    }
    if (f.tol) j["tolerances"] = {{"rtol", *f.tol}, {"atol", *f.tol}};
    if (f.threads) j["threads"] = *f.threads;
    return parse_config(j);
}

SweepConfig config_from_file(const Flags& f) {
    if (f.config.empty()) throw ConfigError("--config is required");
    return merged_config(read_config_json(f.config), f);
}

json figure_json(int which) {
    json j;
    j["sweep"] = {{"axis", "lambda"}, {"start", 0.0}, {"count", 101}};
    j["outputs"] = {"quasienergy", "adiabatic", "berry"};
    switch (which) {
        case 1:
            j["model"] = {{"builtin", {{"example", 1}, {"params", {{"R0", 1.0}}}}}};
            j["sweep"]["stop"] = 2.0;
            break;
        case 2:
            j["model"] = {{"builtin", {{"example", 2}, {"params", {{"t1", 1.0}, {"t2", 0.5}}}}}};
            j["sweep"]["stop"] = 1.0;
            break;
        default:
            j["model"] = {{"builtin",
                           {{"example", 3}, {"params", {{"t0", 0.3}, {"t1", 0.5}, {"t2", 1.0}}}}}};
            j["sweep"]["stop"] = 1.0;
            break;
    }
    return j;
}

fs::path output_dir(const Flags& f) {
    fs::path dir(f.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir)) throw ConfigError("cannot create output directory '" + f.out + "'");
    return dir;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConfigError("cannot write '" + p.string() + "'");
    return os;
}

int do_sweep(const SweepConfig& c, const Flags& f, const std::string& stem, std::ostream& out) {
    const fs::path dir = output_dir(f);
    const SweepResult r = run_sweep(c, resolve_threads(c.threads));
    {
        auto os = open_out(dir / (stem + ".csv"));
        write_sweep_csv(os, r);
    }
    if (c.outputs.count("ws")) {
        auto os = open_out(dir / (stem + "_ws.csv"));
        write_ws_csv(os, r);
    }
    if (c.outputs.count("dynamics")) {
        auto os = open_out(dir / (stem + "_dynamics.jsonl"));
        write_dynamics_jsonl(os, r);
    }
    {
        auto os = open_out(dir / (stem + ".manifest.json"));
        os << sweep_manifest(c, r).dump(2) << '\n';
    }
    out << stem << ": " << r.rows.size() << " points, " << r.failures << " failed, "
        << r.threads << " threads, " << r.wall_seconds << " s -> " << (dir / (stem + ".csv")).string()
        << '\n';
    return r.failures > 0 ? kExitNumerical : kExitOk;
}

int do_ws(const SweepConfig& c, const Flags& f, std::ostream& out) {
    const fs::path dir = output_dir(f);
    const double lam = c.model.lambda;
    const TwoLevelModel model = c.model.model(lam);
    FloquetOptions fo;
    fo.ode = c.ode;
    fo.critical = critical_lambda(model);
    const WSLadder ladder = ws_spectrum(model, c.force, c.l_min, c.l_max, fo);
    {
        auto os = open_out(dir / "ws_spectrum.csv");
        write_spectrum_csv(os, ladder);
    }
    WSEigenstateOptions eo;
    eo.ode = c.ode;
    json states = json::array();
    for (Branch b : {Branch::Plus, Branch::Minus}) {
        const WSEigenstate s = ws_eigenstate(model, ladder, b, 0, c.n_min, c.n_max, eo);
        const std::string name = std::string("ws_eigenstate_") + (b == Branch::Plus ? "plus" : "minus") + ".csv";
        auto os = open_out(dir / name);
        write_eigenstate_csv(os, s);
        states.push_back({{"branch", to_string(b)},
                          {"file", name},
                          {"boundary_residual", s.boundary_residual},
                          {"grid_size", s.grid_size},
                          {"tail_constant_20_200", tail_constant(s, 20, std::min(200, std::max(-c.n_min, c.n_max)))}});
    }
    json m;
    m["config_hash"] = config_hash(c);
    m["config"] = c.semantic_json();
    m["lambda"] = lam;
    m["force"] = c.force;
    m["lambda_critical"] = std::isfinite(fo.critical) ? json(fo.critical) : json("inf");
    m["theta_shift"] = {ladder.theta_shift.real(), ladder.theta_shift.imag()};
    m["mu_minus"] = {ladder.mu_minus.real(), ladder.mu_minus.imag()};
    m["t1_period"] = ladder.t1_period;
    m["t2_period"] = ladder.t2_period;
    m["branch_index"] = ladder.quasi.branch_index;
    try {
        m["classification"] = to_string(classify_transition(model, c.force));
    } catch (const ConfigError& e) {
        m["classification"] = nullptr;
        m["classification_note"] = e.what();
    }
    m["eigenstates"] = states;
    {
        auto os = open_out(dir / "ws_manifest.json");
        os << m.dump(2) << '\n';
    }
    out << "ws: Theta = " << format_double(ladder.theta_shift.real()) << " + "
        << format_double(ladder.theta_shift.imag()) << "i, classification "
        << (m["classification"].is_null() ? std::string("n/a") : m["classification"].get<std::string>())
        << '\n';
    return kExitOk;
}

int do_dynamics(const SweepConfig& c, const Flags& f, std::ostream& out) {
    const fs::path dir = output_dir(f);
    const double lam = c.model.lambda;
    const TwoLevelModel model = c.model.model(lam);
    FloquetOptions fo;
    fo.ode = c.ode;
    fo.critical = critical_lambda(model);
    const QuasiEnergyResult q = quasi_energies(model, c.force, fo);
    const double t1 = kTwoPi / c.force;
    const Trajectory tr = evolve(c.model.lattice(lam), 0.0, c.force, central_site_state(c.cells),
                                 c.periods * t1, t1 / c.samples_per_period);
    const PeriodicityReport rep = periodicity_report(tr, q.mu_plus);
    {
        auto os = open_out(dir / "trajectory.csv");
        write_trajectory_csv(os, tr);
    }
    json j = json::parse(to_json(rep));
    j["config_hash"] = config_hash(c);
    j["theta_shift"] = {q.mu_plus.real(), q.mu_plus.imag()};
    {
        auto os = open_out(dir / "dynamics_report.json");
        os << j.dump(2) << '\n';
    }
    out << "dynamics: " << rep.classification << ", growth " << format_double(rep.growth_rate)
        << " (expected " << format_double(rep.expected_growth_rate) << ")\n";
    return kExitOk;
}

int do_validate(const SweepConfig& c, std::ostream& out) {
    json d;
    d["config_hash"] = config_hash(c);
    if (!c.model.builtin) c.model.hoppings.check_pt_symmetry();
    d["pt_symmetry"] = "ok";
    const TwoLevelModel model = c.model.model(c.model.lambda);
    const double crit = critical_lambda(model);
    d["lambda_critical"] = std::isfinite(crit) ? json(crit) : json("inf");
    d["winding"] = model.phi_winding();
    d["branch_rule"] = kBranchRule;
    json grid = {{"start", c.start}, {"stop", c.stop}, {"count", c.count}};
    d["grid"] = grid;
    json fallback = json::array();
    if (c.axis == Axis::Lambda) {
        for (int i = 0; i < c.count; ++i) {
            const double v = c.grid_value(i);
            if (std::abs(v - crit) < 1e-3) fallback.push_back(v);
        }
    } else if (std::abs(c.model.lambda - crit) < 1e-3) {
        fallback.push_back(c.model.lambda);
    }
    d["fallback_points"] = fallback;
    out << d.dump(2) << '\n';
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Floquet quasi-energies, Berry phases and Wannier-Stark ladders of PT-symmetric two-band models", "zak"};
    app.require_subcommand(1);
    Flags f;

    auto add_common = [&](CLI::App* sc, bool needs_config) {
        auto* opt = sc->add_option("--config", f.config, "JSON configuration file");
        if (needs_config) opt->required();
        sc->add_option("--omega", f.omega, "Cycling frequency");
        sc->add_option("--lambda", f.lambda, "Gain/loss strength");
        sc->add_option("--force", f.force, "DC force for ws and dynamics");
        sc->add_option("--out", f.out, "Output directory")->capture_default_str();
        sc->add_option("--threads", f.threads, "Worker threads (default: ZAK_THREADS or all cores)")
            ->check(CLI::NonNegativeNumber);
        sc->add_option("--tol", f.tol, "Integrator rtol and atol");
    };
    CLI::App* sweep = app.add_subcommand("sweep", "Run a parameter sweep from a config file");
    add_common(sweep, true);
    std::vector<CLI::App*> figs;
    for (int i = 1; i <= 3; ++i) {
        figs.push_back(app.add_subcommand("fig" + std::to_string(i),
                                          "Quasi-energy data for figure " + std::to_string(i)));
        add_common(figs.back(), false);
    }
    CLI::App* ws = app.add_subcommand("ws", "Wannier-Stark spectrum and eigenstates");
    add_common(ws, true);
    CLI::App* dyn = app.add_subcommand("dynamics", "Lattice time evolution and periodicity report");
    add_common(dyn, true);
    CLI::App* val = app.add_subcommand("validate", "Check a configuration without computing");
    add_common(val, true);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (sweep->parsed()) return do_sweep(config_from_file(f), f, "sweep", out);
        for (int i = 0; i < 3; ++i) {
            if (figs[i]->parsed()) {
                const std::string stem = "fig" + std::to_string(i + 1);
                json j = f.config.empty() ? figure_json(i + 1) : read_config_json(f.config);
                return do_sweep(merged_config(j, f), f, stem, out);
            }
        }
        if (ws->parsed()) return do_ws(config_from_file(f), f, out);
        if (dyn->parsed()) return do_dynamics(config_from_file(f), f, out);
        if (val->parsed()) return do_validate(config_from_file(f), out);
    } catch (const ConfigError& e) {
        err << "error [" << e.tag() << "]: " << e.what() << '\n';
        return kExitConfig;
    } catch (const SymmetryError& e) {
        err << "error [" << e.tag() << "]: " << e.what() << '\n';
        return kExitConfig;
    } catch (const InvalidModelError& e) {
        err << "error [" << e.tag() << "]: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Error& e) {
        err << "error [" << e.tag() << "]: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitConfig;
}

}  // namespace zak
