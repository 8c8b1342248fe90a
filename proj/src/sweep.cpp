#include "zak/sweep.hpp"

#include "zak/berry.hpp"
#include "zak/csv.hpp"
#include "zak/errors.hpp"
#include "zak/lattice_dynamics.hpp"
#include "zak/spectral.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>
#include <thread>

#ifndef ZAK_VERSION
#define ZAK_VERSION "0.0.0"
#endif

namespace zak {

using nlohmann::json;

namespace {

const std::vector<std::vector<std::string>> kParamNames{
    {"R0"}, {"t1", "t2"}, {"t0", "t1", "t2"}};

double number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ConfigError(where + ": must be finite");
    return v;
}

int integer(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
    return j.get<int>();
}

Complex complex_value(const json& j, const std::string& where) {
    if (j.is_number()) return {number(j, where), 0.0};
    if (j.is_array() && j.size() == 2) return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
    throw ConfigError(where + ": expected a number or [re, im]");
}

std::map<int, Complex> hopping_map(const json& j, const std::string& where) {
    std::map<int, Complex> out;
    if (j.is_null()) return out;
    if (!j.is_object()) throw ConfigError(where + ": expected an object keyed by offset");
    for (const auto& [key, val] : j.items()) {
        std::size_t used = 0;
        int l = 0;
        try {
            l = std::stoi(key, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != key.size()) throw ConfigError(where + ": offset '" + key + "' is not an integer");
        out[l] = complex_value(val, where + "." + key);
    }
    return out;
}

json hopping_json(const std::map<int, Complex>& m) {
    json j = json::object();
    for (const auto& [l, v] : m) j[std::to_string(l)] = json::array({v.real(), v.imag()});
    return j;
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
    for (const auto& [key, val] : j.items()) {
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
            throw ConfigError(where + ": unknown field '" + key + "'");
        }
    }
}

const char* axis_name(Axis a) {
    switch (a) {
        case Axis::Lambda: return "lambda";
        case Axis::Omega: return "omega";
        case Axis::Force: return "force";
    }
    return "?";
}

}  // namespace

TwoLevelModel ModelDescriptor::model(double lam) const {
    if (builtin) return builtin_example(example, params, lam);
    return bloch_from_hoppings(hoppings).with_lambda(lam);
}

LatticeHoppings ModelDescriptor::lattice(double lam) const {
    if (builtin) return with_gain_loss(hoppings, lam);
    return rescale_gain_loss(hoppings, lam);
}

json ModelDescriptor::to_json() const {
    json j;
    if (builtin) {
        j["builtin"] = {{"example", example}, {"params", params}};
    } else {
        j["hoppings"] = {{"rho", hopping_json(hoppings.rho)},
                         {"sigma", hopping_json(hoppings.sigma)},
                         {"theta", hopping_json(hoppings.theta)},
                         {"eta", hopping_json(hoppings.eta)}};
    }
    j["lambda"] = lambda;
    return j;
}

ModelDescriptor parse_model(const json& j) {
    if (!j.is_object()) throw ConfigError("model: expected an object");
    reject_unknown(j, {"builtin", "hoppings", "lambda"}, "model");
    ModelDescriptor d;
    const bool has_builtin = j.contains("builtin");
    const bool has_hoppings = j.contains("hoppings");
    if (has_builtin == has_hoppings) {
        throw ConfigError("model: exactly one of 'builtin' or 'hoppings' is required");
    }
    if (has_builtin) {
        const json& b = j["builtin"];
        if (!b.is_object() || !b.contains("example")) {
            throw ConfigError("model.builtin: needs 'example' and 'params'");
        }
        reject_unknown(b, {"example", "params"}, "model.builtin");
        d.example = integer(b["example"], "model.builtin.example");
        if (d.example < 1 || d.example > 3) throw ConfigError("model.builtin.example: must be 1, 2 or 3");
        const auto& names = kParamNames[d.example - 1];
        const json& p = b.contains("params") ? b["params"] : json();
        if (p.is_object()) {
            reject_unknown(p, {"R0", "t0", "t1", "t2"}, "model.builtin.params");
            for (const std::string& n : names) {
                if (!p.contains(n)) throw ConfigError("model.builtin.params: missing '" + n + "'");
                d.params.push_back(number(p[n], "model.builtin.params." + n));
            }
            if (p.size() != names.size()) {
                throw ConfigError("model.builtin.params: unexpected parameter for example " +
                                  std::to_string(d.example));
            }
        } else if (p.is_array()) {
            for (std::size_t i = 0; i < p.size(); ++i) {
                d.params.push_back(number(p[i], "model.builtin.params[" + std::to_string(i) + "]"));
            }
        } else {
            throw ConfigError("model.builtin.params: expected an object or array");
        }
        try {
            builtin_example(d.example, d.params, 0.0);
        } catch (const InvalidModelError& e) {
            throw ConfigError(std::string("model.builtin: ") + e.what());
        }
        d.hoppings = builtin_hoppings(d.example, d.params);
        d.lambda = j.contains("lambda") ? number(j["lambda"], "model.lambda") : 0.0;
    } else {
        const json& h = j["hoppings"];
        if (!h.is_object()) throw ConfigError("model.hoppings: expected an object");
        reject_unknown(h, {"rho", "sigma", "theta", "eta"}, "model.hoppings");
        d.builtin = false;
        d.hoppings.rho = hopping_map(h.value("rho", json()), "model.hoppings.rho");
        d.hoppings.sigma = hopping_map(h.value("sigma", json()), "model.hoppings.sigma");
        d.hoppings.theta = hopping_map(h.value("theta", json()), "model.hoppings.theta");
        d.hoppings.eta = hopping_map(h.value("eta", json()), "model.hoppings.eta");
        d.hoppings.check_pt_symmetry();  // SymmetryError names the offset
        bloch_from_hoppings(d.hoppings);  // InvalidModelError for R(k) = 0 etc.
        d.lambda = j.contains("lambda") ? number(j["lambda"], "model.lambda")
                                        : gain_loss_strength(d.hoppings);
    }
    if (d.lambda < 0) throw ConfigError("model.lambda: must be >= 0");
    return d;
}

double SweepConfig::grid_value(int i) const {
    if (i == count - 1) return stop;
    return start + (stop - start) * i / (count - 1);
}

json SweepConfig::semantic_json() const {
    json j;
    j["model"] = model.to_json();
    j["sweep"] = {{"axis", axis_name(axis)}, {"start", start}, {"stop", stop}, {"count", count}};
    j["omega"] = omega;
    j["force"] = force;
    j["outputs"] = std::vector<std::string>(outputs.begin(), outputs.end());
    j["tolerances"] = {{"rtol", ode.rtol}, {"atol", ode.atol}};
    j["dynamics"] = {{"cells", cells}, {"periods", periods}, {"samples_per_period", samples_per_period}};
    j["ws"] = {{"l_min", l_min}, {"l_max", l_max}, {"n_min", n_min}, {"n_max", n_max}};
    return j;
}

SweepConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    reject_unknown(j, {"model", "sweep", "omega", "force", "outputs", "tolerances", "threads",
                       "dynamics", "ws"},
                   "config");
    SweepConfig c;
    if (!j.contains("model")) throw ConfigError("config: missing 'model'");
    c.model = parse_model(j["model"]);

    if (j.contains("omega")) c.omega = number(j["omega"], "omega");
    if (j.contains("force")) c.force = number(j["force"], "force");
    if (!(c.omega > 0)) throw ConfigError("omega: must be > 0");
    if (!(c.force > 0)) throw ConfigError("force: must be > 0");

    if (j.contains("sweep")) {
        const json& s = j["sweep"];
        if (!s.is_object()) throw ConfigError("sweep: expected an object");
        reject_unknown(s, {"axis", "start", "stop", "count"}, "sweep");
        const std::string axis = s.value("axis", "lambda");
        if (axis == "lambda") {
            c.axis = Axis::Lambda;
        } else if (axis == "omega") {
            c.axis = Axis::Omega;
        } else if (axis == "force") {
            c.axis = Axis::Force;
        } else {
            throw ConfigError("sweep.axis: must be lambda, omega or force");
        }
        if (!s.contains("start") || !s.contains("stop") || !s.contains("count")) {
            throw ConfigError("sweep: needs start, stop and count");
        }
        c.start = number(s["start"], "sweep.start");
        c.stop = number(s["stop"], "sweep.stop");
        c.count = integer(s["count"], "sweep.count");
        if (c.count < 2) throw ConfigError("sweep.count: grid needs at least 2 points");
        if (!(c.start < c.stop)) throw ConfigError("sweep: start must be < stop");
        if (c.axis == Axis::Lambda && c.start < 0) throw ConfigError("sweep.start: lambda must be >= 0");
        if (c.axis != Axis::Lambda && !(c.start > 0)) {
            throw ConfigError("sweep.start: frequencies must be > 0");
        }
    }

    if (j.contains("outputs")) {
        const json& o = j["outputs"];
        if (!o.is_array()) throw ConfigError("outputs: expected an array of strings");
        c.outputs.clear();
        for (const json& v : o) {
            if (!v.is_string()) throw ConfigError("outputs: expected strings");
            const std::string s = v.get<std::string>();
            if (s != "quasienergy" && s != "adiabatic" && s != "berry" && s != "ws" &&
                s != "dynamics") {
                throw ConfigError("outputs: unknown output '" + s + "'");
            }
            c.outputs.insert(s);
        }
        if (c.outputs.empty()) throw ConfigError("outputs: nothing requested");
    }

    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        if (!t.is_object()) throw ConfigError("tolerances: expected an object");
        reject_unknown(t, {"rtol", "atol"}, "tolerances");
        if (t.contains("rtol")) c.ode.rtol = number(t["rtol"], "tolerances.rtol");
        if (t.contains("atol")) c.ode.atol = number(t["atol"], "tolerances.atol");
    }
    for (const auto& [name, v] : {std::pair{"rtol", c.ode.rtol}, std::pair{"atol", c.ode.atol}}) {
        if (!(v >= 1e-14 && v <= 1e-6)) {
            throw ConfigError(std::string("tolerances.") + name + ": must lie in [1e-14, 1e-6]");
        }
    }

    if (j.contains("threads")) {
        c.threads = integer(j["threads"], "threads");
        if (c.threads < 0) throw ConfigError("threads: must be >= 0");
    }
    if (j.contains("dynamics")) {
        const json& d = j["dynamics"];
        if (!d.is_object()) throw ConfigError("dynamics: expected an object");
        reject_unknown(d, {"cells", "periods", "samples_per_period"}, "dynamics");
        if (d.contains("cells")) c.cells = integer(d["cells"], "dynamics.cells");
        if (d.contains("periods")) c.periods = number(d["periods"], "dynamics.periods");
        if (d.contains("samples_per_period")) {
            c.samples_per_period = integer(d["samples_per_period"], "dynamics.samples_per_period");
        }
        if (c.cells < 4 || c.cells % 2) throw ConfigError("dynamics.cells: even and >= 4");
        if (!(c.periods > 0)) throw ConfigError("dynamics.periods: must be > 0");
        if (c.samples_per_period < 2) throw ConfigError("dynamics.samples_per_period: >= 2");
    }
    if (j.contains("ws")) {
        const json& w = j["ws"];
        if (!w.is_object()) throw ConfigError("ws: expected an object");
        reject_unknown(w, {"l_min", "l_max", "n_min", "n_max"}, "ws");
        if (w.contains("l_min")) c.l_min = integer(w["l_min"], "ws.l_min");
        if (w.contains("l_max")) c.l_max = integer(w["l_max"], "ws.l_max");
        if (w.contains("n_min")) c.n_min = integer(w["n_min"], "ws.n_min");
        if (w.contains("n_max")) c.n_max = integer(w["n_max"], "ws.n_max");
        if (c.l_min > c.l_max) throw ConfigError("ws: l_min > l_max");
        if (c.n_min > c.n_max) throw ConfigError("ws: n_min > n_max");
    }
    return c;
}

json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // Translate the byte offset into line and column.
        const std::size_t pos = std::min<std::size_t>(e.byte, text.size());
        int line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < pos; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                          ": malformed JSON (" + e.what() + ")");
    }
}

SweepConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(parse_json_text(text, path));
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string config_hash(const SweepConfig& c) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                  static_cast<unsigned long long>(fnv1a64(c.semantic_json().dump())));
    return buf;
}

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ZAK_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

SweepRow compute_point(const SweepConfig& c, double param, double critical) {
    SweepRow row;
    row.param = param;
    try {
        double lam = c.model.lambda;
        double omega = c.omega;
        double force = c.force;
        switch (c.axis) {
            case Axis::Lambda: lam = param; break;
            case Axis::Omega: omega = param; break;
            case Axis::Force: omega = force = param; break;
        }
        const TwoLevelModel model = c.model.model(lam);
        const bool near = std::abs(lam - critical) < 1e-3;

        std::optional<BerryResult> berry;
        Complex adiabatic(std::numeric_limits<double>::quiet_NaN(),
                          std::numeric_limits<double>::quiet_NaN());
        if (!near) {
            BerryOptions bo;
            bo.critical = critical;
            berry = berry_phase(model, bo);
            adiabatic = adiabatic_quasi_energy(model, omega, *berry, critical).first;
            if (c.outputs.count("berry")) row.gamma_plus = wrap_phase(berry->gamma_plus);
            if (c.outputs.count("adiabatic")) row.mu_adiabatic_plus = adiabatic;
        } else {
            row.status = "adiabatic_unavailable";
        }

        auto quasi = [&](double w) {
            const Monodromy m = monodromy(model, w, c.ode);
            std::optional<EigenSystem> start;
            try {
                start = eigensystem(model, 0.0);
            } catch (const ExceptionalPointError&) {
            }
            const Complex adi = w == omega ? adiabatic
                                           : (near ? adiabatic
                                                   : adiabatic_quasi_energy(model, w, *berry, critical).first);
            return quasi_energies_from(m, adi, start ? &*start : nullptr);
        };

        if (c.outputs.count("quasienergy") || c.outputs.count("ws")) {
            const QuasiEnergyResult q = quasi(omega);
            if (c.outputs.count("quasienergy")) {
                row.mu_plus = q.mu_plus;
                row.mu_minus = q.mu_minus;
                row.branch_index = q.branch_index;
                row.branch_from_adiabatic = q.branch_from_adiabatic;
                row.error_estimate = omega / kTwoPi * q.stats.error_sum;
            }
            if (c.outputs.count("ws")) {
                for (int l = c.l_min; l <= c.l_max; ++l) {
                    for (const auto& [br, mu] : {std::pair{"+", q.mu_plus}, std::pair{"-", q.mu_minus}}) {
                        const Complex e = l * omega + mu;
                        row.ws_rows.push_back(format_double(param) + "," + std::to_string(l) + "," +
                                              br + "," + format_double(e.real()) + "," +
                                              format_double(e.imag()));
                    }
                }
            }
        }

        if (c.outputs.count("dynamics")) {
            const QuasiEnergyResult qf = quasi(force);
            const double t1 = kTwoPi / force;
            const Trajectory tr = evolve(c.model.lattice(lam), 0.0, force,
                                         central_site_state(c.cells), c.periods * t1,
                                         t1 / c.samples_per_period);
            json rep = json::parse(to_json(periodicity_report(tr, qf.mu_plus)));
            rep["param"] = param;
            row.dynamics_json = rep.dump();
        }
    } catch (const Error& e) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        row.mu_plus = row.mu_minus = row.mu_adiabatic_plus = row.gamma_plus = Complex(nan, nan);
        row.error_estimate = nan;
        row.branch_index = 0;
        row.status = e.tag();
        row.message = e.what();
    }
    return row;
}

SweepResult run_sweep(const SweepConfig& c, int threads) {
    const auto t0 = std::chrono::steady_clock::now();
    SweepResult r;
    r.threads = std::max(1, threads);
    r.lambda_critical = critical_lambda(c.model.model(c.model.lambda));
    r.rows.resize(c.count);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < c.count; i = next++) {
            r.rows[i] = compute_point(c, c.grid_value(i), r.lambda_critical);
        }
    };
    if (r.threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < r.threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const SweepRow& row : r.rows) {
        if (row.status != "ok" && row.status != "adiabatic_unavailable") ++r.failures;
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

void write_sweep_csv(std::ostream& os, const SweepResult& r) {
    os << "param,re_mu_plus,im_mu_plus,re_mu_minus,im_mu_minus,re_mu_adiab_plus,"
          "im_mu_adiab_plus,re_gamma_plus,im_gamma_plus,branch_index,error_estimate,status\n";
    for (const SweepRow& row : r.rows) {
        os << format_double(row.param) << ',' << format_double(row.mu_plus.real()) << ','
           << format_double(row.mu_plus.imag()) << ',' << format_double(row.mu_minus.real())
           << ',' << format_double(row.mu_minus.imag()) << ','
           << format_double(row.mu_adiabatic_plus.real()) << ','
           << format_double(row.mu_adiabatic_plus.imag()) << ','
           << format_double(row.gamma_plus.real()) << ',' << format_double(row.gamma_plus.imag())
           << ',' << row.branch_index << ',' << format_double(row.error_estimate) << ','
           << row.status << '\n';
    }
}

void write_ws_csv(std::ostream& os, const SweepResult& r) {
    os << "param,l,branch,re_E,im_E\n";
    for (const SweepRow& row : r.rows) {
        for (const std::string& line : row.ws_rows) os << line << '\n';
    }
}

void write_dynamics_jsonl(std::ostream& os, const SweepResult& r) {
    for (const SweepRow& row : r.rows) {
        if (!row.dynamics_json.empty()) {
            os << row.dynamics_json << '\n';
        } else {
            os << json{{"param", row.param}, {"status", row.status}, {"error", row.message}}.dump()
               << '\n';
        }
    }
}

json sweep_manifest(const SweepConfig& c, const SweepResult& r) {
    json m;
    m["config_hash"] = config_hash(c);
    m["config"] = c.semantic_json();
    m["versions"] = {{"zak", ZAK_VERSION},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                   std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"compiler", __VERSION__}};
    m["wall_seconds"] = r.wall_seconds;
    if (std::isfinite(r.lambda_critical)) {
        m["lambda_critical"] = r.lambda_critical;
    } else {
        m["lambda_critical"] = "inf";
    }
    m["branch_rule"] = kBranchRule;
    m["grid"] = {{"axis", axis_name(c.axis)}, {"start", c.start}, {"stop", c.stop},
                 {"count", c.count}, {"spacing", "uniform"}};
    m["points"] = r.rows.size();
    m["failures"] = r.failures;
    m["threads"] = r.threads;
    json failed = json::array();
    for (const SweepRow& row : r.rows) {
        if (!row.message.empty()) failed.push_back({{"param", row.param}, {"status", row.status}, {"error", row.message}});
    }
    m["failed_points"] = failed;
    return m;
}

}  // namespace zak
