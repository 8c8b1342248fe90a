#include <doctest.h>

#include "zak/errors.hpp"
#include "zak/floquet.hpp"
#include "zak/sweep.hpp"

#include <cmath>
#include <functional>
#include <sstream>
#include <string>

using namespace zak;
using nlohmann::json;

namespace {

json base_config() {
    return json::parse(R"({
        "model": {"builtin": {"example": 1, "params": {"R0": 1.0}}},
        "sweep": {"axis": "lambda", "start": 0.0, "stop": 2.0, "count": 9},
        "omega": 0.1
    })");
}

std::string csv_of(const SweepConfig& c, int threads) {
    std::ostringstream os;
    write_sweep_csv(os, run_sweep(c, threads));
    return os.str();
}

}  // namespace

TEST_CASE("config parsing") {
    const SweepConfig c = parse_config(base_config());
    CHECK(c.model.builtin);
    CHECK(c.model.example == 1);
    CHECK(c.count == 9);
    CHECK(c.grid_value(0) == 0.0);
    CHECK(c.grid_value(8) == 2.0);
    CHECK(c.grid_value(4) == doctest::Approx(1.0));
    CHECK(c.omega == 0.1);

    SUBCASE("params as array") {
        json j = base_config();
        j["model"]["builtin"]["params"] = {1.0};
        CHECK(parse_config(j).model.params == std::vector<double>{1.0});
    }
    SUBCASE("hoppings model") {
        json j = base_config();
        j["model"] = json::parse(R"({"hoppings": {"rho": {"0": 1.0}, "eta": {"0": 1.0}, "sigma": {"0": 1.0, "1": 0.5}, "theta": {"0": 1.0, "-1": 0.5}}})");
        const SweepConfig h = parse_config(j);
        CHECK_FALSE(h.model.builtin);
        CHECK(h.model.lambda == 0.0);
    }
}

TEST_CASE("config errors") {
    auto rejects = [](json j) { CHECK_THROWS_AS(parse_config(j), ConfigError); };
    json j = base_config();
    j["sweep"]["count"] = 1;
    rejects(j);
    j = base_config();
    j["sweep"]["count"] = 0;
    rejects(j);
    j = base_config();
    j["sweep"]["stop"] = 0.0;
    rejects(j);
    j = base_config();
    j["tolerances"] = {{"rtol", 1e-16}};
    rejects(j);
    j = base_config();
    j["tolerances"] = {{"atol", 1e-3}};
    rejects(j);
    j = base_config();
    j["colour"] = "blue";
    rejects(j);
    j = base_config();
    j["outputs"] = {"plots"};
    rejects(j);
    j = base_config();
    j["model"]["builtin"]["example"] = 4;
    rejects(j);
    j = base_config();
    j["model"]["builtin"]["params"] = {{"t1", 1.0}};
    rejects(j);
    j = base_config();
    j["omega"] = -0.1;
    rejects(j);
}

TEST_CASE("symmetry violation in hoppings") {
    json j = base_config();
    j["model"] = json::parse(R"({"hoppings": {"rho": {"0": 1.0, "1": 0.5}, "eta": {"0": 1.0}, "sigma": {"0": 1.0}, "theta": {"0": 1.0}}})");
    CHECK_THROWS_AS(parse_config(j), SymmetryError);
}

TEST_CASE("malformed JSON reports a location") {
    try {
        parse_json_text("{\n  \"model\": {\n    \"builtin\": ,\n}", "cfg.json");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("cfg.json:3:") == 0);
    }
}

TEST_CASE("config hash tracks semantic fields only") {
    const SweepConfig a = parse_config(base_config());
    json j = base_config();
    j["threads"] = 7;
    CHECK(config_hash(parse_config(j)) == config_hash(a));

    std::vector<json> variants;
    for (auto edit : std::vector<std::function<void(json&)>>{
             [](json& x) { x["omega"] = 0.02; },
             [](json& x) { x["sweep"]["count"] = 10; },
             [](json& x) { x["sweep"]["stop"] = 1.5; },
             [](json& x) { x["model"]["builtin"]["params"]["R0"] = 2.0; },
             [](json& x) { x["tolerances"] = {{"rtol", 1e-10}}; },
             [](json& x) { x["outputs"] = {"quasienergy"}; },
             [](json& x) { x["model"]["lambda"] = 0.1; },
         }) {
        json v = base_config();
        edit(v);
        CHECK(config_hash(parse_config(v)) != config_hash(a));
    }
    CHECK(fnv1a64("") == 14695981039346656037ull);
    CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("sweep rows match direct computation") {
    const SweepConfig c = parse_config(base_config());
    const SweepResult r = run_sweep(c, 1);
    REQUIRE(r.rows.size() == 9);
    CHECK(r.lambda_critical == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.failures == 0);
    for (const SweepRow& row : r.rows) {
        if (std::abs(row.param - 1.0) < 1e-3) {
            CHECK(row.status == "adiabatic_unavailable");
            CHECK(std::isnan(row.mu_adiabatic_plus.real()));
            continue;
        }
        CHECK(row.status == "ok");
        const Complex exact = exact_example1(1.0, row.param, 0.1).first;
        CHECK(std::abs(row.mu_plus - exact) <= 1e-8);
        CHECK(std::abs(row.mu_minus + exact) <= 1e-8);
        CHECK(std::isfinite(row.error_estimate));
    }
}

TEST_CASE("sweep output is independent of thread count") {
    json j = base_config();
    j["model"] = json::parse(R"({"builtin": {"example": 3, "params": [0.3, 0.5, 1.0]}})");
    j["sweep"] = {{"axis", "lambda"}, {"start", 0.0}, {"stop", 1.0}, {"count", 21}};
    j["omega"] = 0.1;
    const SweepConfig c = parse_config(j);
    const std::string one = csv_of(c, 1);
    CHECK(one == csv_of(c, 8));
    CHECK(one == csv_of(c, 3));
}

TEST_CASE("omega and force axes") {
    json j = base_config();
    j["model"]["lambda"] = 0.5;
    j["sweep"] = {{"axis", "omega"}, {"start", 0.05}, {"stop", 0.1}, {"count", 2}};
    const SweepResult r = run_sweep(parse_config(j), 1);
    CHECK(std::abs(r.rows[0].mu_plus - exact_example1(1.0, 0.5, 0.05).first) <= 1e-8);
    CHECK(std::abs(r.rows[1].mu_plus - exact_example1(1.0, 0.5, 0.1).first) <= 1e-8);

    j["sweep"]["axis"] = "force";
    j["outputs"] = {"quasienergy", "ws"};
    j["ws"] = {{"l_min", -1}, {"l_max", 1}};
    const SweepResult f = run_sweep(parse_config(j), 1);
    CHECK(f.rows[0].ws_rows.size() == 6);
    std::ostringstream os;
    write_ws_csv(os, f);
    CHECK(os.str().rfind("param,l,branch,re_E,im_E\n", 0) == 0);
}

TEST_CASE("failed points become NaN rows") {
    json j = base_config();
    j["model"]["builtin"]["params"]["R0"] = 1.0;
    j["sweep"] = {{"axis", "lambda"}, {"start", 0.0}, {"stop", 1.0}, {"count", 2}};
    j["tolerances"] = {{"rtol", 1e-14}, {"atol", 1e-14}};
    SweepConfig c = parse_config(j);
    c.ode.max_steps = 5;  // forces an integration failure
    const SweepResult r = run_sweep(c, 2);
    CHECK(r.failures == 2);
    for (const SweepRow& row : r.rows) {
        CHECK(row.status == "integration");
        CHECK(std::isnan(row.mu_plus.real()));
    }
    std::ostringstream os;
    write_sweep_csv(os, r);
    CHECK(os.str().find(",nan,nan,") != std::string::npos);
    const json m = sweep_manifest(c, r);
    CHECK(m["failures"] == 2);
    CHECK(m["failed_points"].size() == 2);
}
