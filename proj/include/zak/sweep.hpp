#pragma once

#include "zak/floquet.hpp"
#include "zak/model.hpp"
#include "zak/ode.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace zak {

// Model part of a configuration: a builtin example or explicit hoppings.
struct ModelDescriptor {
    bool builtin = true;
    int example = 1;
    std::vector<double> params;
    LatticeHoppings hoppings;  // filled for both kinds
    double lambda = 0.0;

    TwoLevelModel model(double lambda) const;
    // Lattice with the gain/loss strength lambda already included.
    LatticeHoppings lattice(double lambda) const;
    nlohmann::json to_json() const;
};

ModelDescriptor parse_model(const nlohmann::json& j);

enum class Axis { Lambda, Omega, Force };

struct SweepConfig {
    ModelDescriptor model;
    Axis axis = Axis::Lambda;
    double start = 0.0;
    double stop = 1.0;
    int count = 2;
    double omega = 0.02;  // fixed value when the axis is lambda
    double force = 0.1;
    std::set<std::string> outputs{"quasienergy", "adiabatic", "berry"};
    OdeOptions ode;
    int threads = 0;  // 0: ZAK_THREADS or hardware concurrency

    // Dynamics settings (output "dynamics" and the dynamics subcommand).
    int cells = 400;
    double periods = 16.0;
    int samples_per_period = 64;
    // WS settings (output "ws" and the ws subcommand).
    int l_min = -5;
    int l_max = 5;
    int n_min = -200;
    int n_max = 200;

    double grid_value(int i) const;
    // Canonical JSON of every field that changes results (threads excluded).
    nlohmann::json semantic_json() const;
};

// Throws ConfigError naming the offending field.
SweepConfig parse_config(const nlohmann::json& j);
// Throws ConfigError with line and column for malformed JSON.
SweepConfig load_config(const std::string& path);
nlohmann::json parse_json_text(const std::string& text, const std::string& origin);

std::uint64_t fnv1a64(const std::string& bytes);
std::string config_hash(const SweepConfig& c);

int resolve_threads(int requested);

struct SweepRow {
    double param = 0.0;
    Complex mu_plus{std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    Complex mu_minus = mu_plus;
    Complex mu_adiabatic_plus = mu_plus;
    Complex gamma_plus = mu_plus;
    int branch_index = 0;
    bool branch_from_adiabatic = false;
    double error_estimate = std::numeric_limits<double>::quiet_NaN();
    std::string status = "ok";
    std::string message;
    std::vector<std::string> ws_rows;   // preformatted "l,branch,re_E,im_E"
    std::string dynamics_json;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    double lambda_critical = 0.0;
    double wall_seconds = 0.0;
    int failures = 0;
    int threads = 1;
};

SweepRow compute_point(const SweepConfig& c, double param, double critical);
SweepResult run_sweep(const SweepConfig& c, int threads);

void write_sweep_csv(std::ostream& os, const SweepResult& r);
void write_ws_csv(std::ostream& os, const SweepResult& r);
void write_dynamics_jsonl(std::ostream& os, const SweepResult& r);
nlohmann::json sweep_manifest(const SweepConfig& c, const SweepResult& r);

inline constexpr const char* kBranchRule =
    "mu+ multiplier chosen by eigenvector weight on u+(k=0); integer branch nearest the "
    "adiabatic estimate (search n in [-5,5] around it); principal branch with the dominant "
    "multiplier when |lambda - critical| < 1e-3";

}  // namespace zak
