#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <dpp/engine.hpp>
#include <dpp/optimizer.hpp>

namespace dpp::cli {

// Bad or missing configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Shape = std::pair<double, double>;

struct RunConfig {
    // [design]
    std::optional<int> n_c;
    std::optional<int> n_t;
    Shape prior_c{0.001, 0.001};
    Shape prior_t{0.001, 0.001};
    std::optional<int> y_ch;
    std::optional<double> p_ch;  // y_ch = round(p_ch * n_ch) when y_ch is absent
    std::optional<int> n_ch;
    std::optional<int> n_ch_e;   // defaults to n_ch

    // [borrowing]
    std::string method = "eb";
    std::optional<double> eta;   // method default when absent
    double theta = 0.5;
    double delta_max = std::numeric_limits<double>::infinity();

    // [simulation]
    std::string mode = "exact";
    std::uint64_t n_sims = 100000;
    std::uint64_t seed = 20240101;
    double alpha = 0.1;
    double eps = 0.01;
    std::optional<double> p_null;  // defaults to the historical rate
    std::optional<double> tau;
    unsigned threads = 0;

    // [scenarios]
    std::vector<double> p_c;
    std::string p_t_rule = "offset";
    std::vector<double> p_t{0.0, 0.2};

    // [weights]
    std::vector<int> y_c;
    std::vector<double> p_hat_c;
    std::vector<Shape> priors;  // defaults to prior_c

    // [optimize]
    int n_c_min = 10;
    int n_c_max = 60;
    int n_c_step = 1;
    double ratio = 1.0;
    std::vector<double> multipliers{1.0};
    double target_power = 0.8;
    double max_mean_pmd = std::numeric_limits<double>::infinity();
    double max_xi = 1.0;
    double band = 0.1;
    double power_offset = 0.2;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

// Applies "section.key=value".
void apply_override(RunConfig& config, const std::string& assignment);
void set_field(RunConfig& config, const std::string& section, const std::string& key,
               const std::string& value);

// Canonical INI text: fixed section and key order, every set field, shortest
// round-trip numbers. parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

// FNV-1a 64 over the canonical text, as 16 hex digits.
std::string config_hash(const RunConfig& config);
// Hash over the fields a calibrated tau depends on.
std::string design_hash(const RunConfig& config);

std::string fnv1a_hex(const std::string& text);

// Typed views; throw ConfigError on missing or invalid fields.
HistoricalControl history(const RunConfig& config);
double historical_rate(const RunConfig& config);  // p_ch if given, else y_ch / n_ch
BorrowingMethod borrowing_method(const RunConfig& config);
BorrowingPolicy borrowing_policy(const RunConfig& config, const HistoricalControl& hist);
DesignSpec design_spec(const RunConfig& config);
EvaluationMethod evaluation(const RunConfig& config);
std::vector<Scenario> scenarios(const RunConfig& config);
double null_rate(const RunConfig& config);
OptimizationConstraints constraints(const RunConfig& config);
SearchSetting search_setting(const RunConfig& config);

}  // namespace dpp::cli
