#include "cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include <dpp/errors.hpp>

namespace dpp::cli {
namespace {

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::string token;
    for (char ch : text) {
        if (ch == ',' || ch == ' ' || ch == '\t') {
            if (!token.empty()) out.push_back(std::move(token));
            token.clear();
        } else {
            token += ch;
        }
    }
    if (!token.empty()) out.push_back(std::move(token));
    return out;
}

template <class T>
T parse_number(const std::string& text, const char* expected) {
    T value{};
    const char* first = text.data();
    const char* last = first + text.size();
    if (!text.empty() && text.front() == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || first == last)
        throw ConfigError(fmt::format("expected {}, got '{}'", expected, text));
    return value;
}

int to_int(const std::string& s) { return parse_number<int>(s, "an integer"); }
std::uint64_t to_u64(const std::string& s) {
    return parse_number<std::uint64_t>(s, "a nonnegative integer");
}
double to_double(const std::string& s) {
    const double v = parse_number<double>(s, "a number");
    if (std::isnan(v)) throw ConfigError("expected a number, got 'nan'");
    return v;
}

std::vector<double> to_doubles(const std::string& s) {
    std::vector<double> out;
    for (const auto& t : split_list(s)) out.push_back(to_double(t));
    return out;
}

std::vector<int> to_ints(const std::string& s) {
    std::vector<int> out;
    for (const auto& t : split_list(s)) out.push_back(to_int(t));
    return out;
}

Shape to_shape(const std::string& s) {
    const auto parts = split_list(s);
    if (parts.size() != 2)
        throw ConfigError(fmt::format("expected two beta shapes, got '{}'", s));
    return {to_double(parts[0]), to_double(parts[1])};
}

std::vector<Shape> to_shapes(const std::string& s) {
    std::vector<Shape> out;
    for (const auto& t : split_list(s)) {
        const auto colon = t.find(':');
        if (colon == std::string::npos)
            throw ConfigError(fmt::format("expected alpha:beta, got '{}'", t));
        out.emplace_back(to_double(t.substr(0, colon)), to_double(t.substr(colon + 1)));
    }
    return out;
}

std::string word(const std::string& s, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
        if (s == a) return s;
    throw ConfigError(fmt::format("expected one of {}, got '{}'", fmt::join(allowed, "|"), s));
}

std::string num(double v) { return fmt::format("{}", v); }
std::string shape(const Shape& s) { return fmt::format("{} {}", s.first, s.second); }

struct Field {
    const char* section;
    const char* key;
    std::function<void(RunConfig&, const std::string&)> parse;
    std::function<std::optional<std::string>(const RunConfig&)> emit;
};

template <class T>
std::optional<std::string> opt_num(const std::optional<T>& v) {
    if (!v) return std::nullopt;
    return fmt::format("{}", *v);
}

const std::vector<Field>& fields() {
    using R = RunConfig;
    using S = const std::string&;
    static const std::vector<Field> table{
        {"design", "n_c", [](R& c, S v) { c.n_c = to_int(v); }, [](const R& c) { return opt_num(c.n_c); }},
        {"design", "n_t", [](R& c, S v) { c.n_t = to_int(v); }, [](const R& c) { return opt_num(c.n_t); }},
        {"design", "prior_c", [](R& c, S v) { c.prior_c = to_shape(v); },
         [](const R& c) { return std::optional(shape(c.prior_c)); }},
        {"design", "prior_t", [](R& c, S v) { c.prior_t = to_shape(v); },
         [](const R& c) { return std::optional(shape(c.prior_t)); }},
        {"design", "y_ch", [](R& c, S v) { c.y_ch = to_int(v); }, [](const R& c) { return opt_num(c.y_ch); }},
        {"design", "p_ch", [](R& c, S v) { c.p_ch = to_double(v); }, [](const R& c) { return opt_num(c.p_ch); }},
        {"design", "n_ch", [](R& c, S v) { c.n_ch = to_int(v); }, [](const R& c) { return opt_num(c.n_ch); }},
        {"design", "n_ch_e", [](R& c, S v) { c.n_ch_e = to_int(v); },
         [](const R& c) { return opt_num(c.n_ch_e); }},

        {"borrowing", "method", [](R& c, S v) { c.method = word(v, {"eb", "bp", "gbc", "jsd", "fixed"}); },
         [](const R& c) { return std::optional(c.method); }},
        {"borrowing", "eta", [](R& c, S v) { c.eta = to_double(v); }, [](const R& c) { return opt_num(c.eta); }},
        {"borrowing", "theta", [](R& c, S v) { c.theta = to_double(v); },
         [](const R& c) { return std::optional(num(c.theta)); }},
        {"borrowing", "delta_max", [](R& c, S v) { c.delta_max = to_double(v); },
         [](const R& c) { return std::optional(num(c.delta_max)); }},

        {"simulation", "mode", [](R& c, S v) { c.mode = word(v, {"exact", "mc"}); },
         [](const R& c) { return std::optional(c.mode); }},
        {"simulation", "n_sims", [](R& c, S v) { c.n_sims = to_u64(v); },
         [](const R& c) { return std::optional(fmt::format("{}", c.n_sims)); }},
        {"simulation", "seed", [](R& c, S v) { c.seed = to_u64(v); },
         [](const R& c) { return std::optional(fmt::format("{}", c.seed)); }},
        {"simulation", "alpha", [](R& c, S v) { c.alpha = to_double(v); },
         [](const R& c) { return std::optional(num(c.alpha)); }},
        {"simulation", "eps", [](R& c, S v) { c.eps = to_double(v); },
         [](const R& c) { return std::optional(num(c.eps)); }},
        {"simulation", "p_null", [](R& c, S v) { c.p_null = to_double(v); },
         [](const R& c) { return opt_num(c.p_null); }},
        {"simulation", "tau", [](R& c, S v) { c.tau = to_double(v); }, [](const R& c) { return opt_num(c.tau); }},
        {"simulation", "threads", [](R& c, S v) { c.threads = static_cast<unsigned>(to_u64(v)); },
         [](const R& c) { return std::optional(fmt::format("{}", c.threads)); }},

        {"scenarios", "p_c", [](R& c, S v) { c.p_c = to_doubles(v); },
         [](const R& c) { return std::optional(fmt::format("{}", fmt::join(c.p_c, " "))); }},
        {"scenarios", "p_t_rule", [](R& c, S v) { c.p_t_rule = word(v, {"offset", "absolute"}); },
         [](const R& c) { return std::optional(c.p_t_rule); }},
        {"scenarios", "p_t", [](R& c, S v) { c.p_t = to_doubles(v); },
         [](const R& c) { return std::optional(fmt::format("{}", fmt::join(c.p_t, " "))); }},

        {"weights", "y_c", [](R& c, S v) { c.y_c = to_ints(v); },
         [](const R& c) { return std::optional(fmt::format("{}", fmt::join(c.y_c, " "))); }},
        {"weights", "p_hat_c", [](R& c, S v) { c.p_hat_c = to_doubles(v); },
         [](const R& c) { return std::optional(fmt::format("{}", fmt::join(c.p_hat_c, " "))); }},
        {"weights", "priors", [](R& c, S v) { c.priors = to_shapes(v); },
         [](const R& c) {
             std::vector<std::string> parts;
             for (const auto& s : c.priors) parts.push_back(fmt::format("{}:{}", s.first, s.second));
             return std::optional(fmt::format("{}", fmt::join(parts, " ")));
         }},

        {"optimize", "n_c_min", [](R& c, S v) { c.n_c_min = to_int(v); },
         [](const R& c) { return std::optional(fmt::format("{}", c.n_c_min)); }},
        {"optimize", "n_c_max", [](R& c, S v) { c.n_c_max = to_int(v); },
         [](const R& c) { return std::optional(fmt::format("{}", c.n_c_max)); }},
        {"optimize", "n_c_step", [](R& c, S v) { c.n_c_step = to_int(v); },
         [](const R& c) { return std::optional(fmt::format("{}", c.n_c_step)); }},
        {"optimize", "ratio", [](R& c, S v) { c.ratio = to_double(v); },
         [](const R& c) { return std::optional(num(c.ratio)); }},
        {"optimize", "multipliers", [](R& c, S v) { c.multipliers = to_doubles(v); },
         [](const R& c) { return std::optional(fmt::format("{}", fmt::join(c.multipliers, " "))); }},
        {"optimize", "target_power", [](R& c, S v) { c.target_power = to_double(v); },
         [](const R& c) { return std::optional(num(c.target_power)); }},
        {"optimize", "max_mean_pmd", [](R& c, S v) { c.max_mean_pmd = to_double(v); },
         [](const R& c) { return std::optional(num(c.max_mean_pmd)); }},
        {"optimize", "max_xi", [](R& c, S v) { c.max_xi = to_double(v); },
         [](const R& c) { return std::optional(num(c.max_xi)); }},
        {"optimize", "band", [](R& c, S v) { c.band = to_double(v); },
         [](const R& c) { return std::optional(num(c.band)); }},
        {"optimize", "power_offset", [](R& c, S v) { c.power_offset = to_double(v); },
         [](const R& c) { return std::optional(num(c.power_offset)); }},
    };
    return table;
}

const char* const kSections[] = {"design", "borrowing", "simulation", "scenarios", "weights",
                                 "optimize"};

std::string emit_sections(const RunConfig& config, std::initializer_list<std::string> only) {
    std::string out;
    for (const char* section : kSections) {
        if (only.size() && std::find(only.begin(), only.end(), section) == only.end()) continue;
        std::string body;
        for (const Field& f : fields()) {
            if (std::string(f.section) != section) continue;
            if (auto v = f.emit(config)) {
                body += f.key;
                body += v->empty() ? " =\n" : " = " + *v + "\n";
            }
        }
        if (body.empty()) continue;
        if (!out.empty()) out += "\n";
        out += fmt::format("[{}]\n{}", section, body);
    }
    return out;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

void require_rate(double p, const std::string& name) {
    require(p >= 0.0 && p <= 1.0, fmt::format("{} must lie in [0, 1], got {}", name, p));
}

}  // namespace

void set_field(RunConfig& config, const std::string& section, const std::string& key,
               const std::string& value) {
    for (const Field& f : fields()) {
        if (section == f.section && key == f.key) {
            try {
                f.parse(config, value);
            } catch (const ConfigError& e) {
                throw ConfigError(fmt::format("[{}] {}: {}", section, key, e.what()));
            }
            return;
        }
    }
    throw ConfigError(fmt::format("unknown key [{}] {}", section, key));
}

RunConfig parse_config(std::istream& in) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("line {}: {}", e.line(), e.message()));
    }
    RunConfig config;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigError(fmt::format("key '{}' is outside any section", section));
        if (std::find_if(std::begin(kSections), std::end(kSections),
                         [&](const char* s) { return section == s; }) == std::end(kSections))
            throw ConfigError(fmt::format("unknown section [{}]", section));
        for (const auto& [key, value] : body) set_field(config, section, key, value.data());
    }
    return config;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
    return parse_config(in);
}

void apply_override(RunConfig& config, const std::string& assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
        throw ConfigError(fmt::format("override '{}' is not section.key=value", assignment));
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t");
        const auto e = s.find_last_not_of(" \t");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    set_field(config, trim(assignment.substr(0, dot)), trim(assignment.substr(dot + 1, eq - dot - 1)),
              trim(assignment.substr(eq + 1)));
}

std::string emit_config(const RunConfig& config) { return emit_sections(config, {}); }

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

std::string config_hash(const RunConfig& config) { return fnv1a_hex(emit_config(config)); }

std::string design_hash(const RunConfig& config) {
    return fnv1a_hex(emit_sections(config, {"design", "borrowing"}) +
                     fmt::format("alpha = {}\np_null = {}\n", config.alpha, null_rate(config)));
}

HistoricalControl history(const RunConfig& c) {
    require(c.n_ch.has_value(), "[design] n_ch is required");
    require(*c.n_ch >= 1, fmt::format("[design] n_ch must be at least 1, got {}", *c.n_ch));
    require(c.y_ch || c.p_ch, "[design] needs y_ch or p_ch");
    const int n_ch_e = c.n_ch_e.value_or(*c.n_ch);
    require(n_ch_e >= 0 && n_ch_e <= *c.n_ch,
            fmt::format("[design] n_ch_e must lie in [0, n_ch], got {}", n_ch_e));
    if (c.p_ch) require_rate(*c.p_ch, "[design] p_ch");
    const int y_ch = c.y_ch ? *c.y_ch : static_cast<int>(std::lround(*c.p_ch * *c.n_ch));
    require(y_ch >= 0 && y_ch <= *c.n_ch,
            fmt::format("[design] y_ch must lie in [0, n_ch], got {}", y_ch));
    return {y_ch, *c.n_ch, n_ch_e};
}

double historical_rate(const RunConfig& c) {
    if (c.p_ch && !c.y_ch) return *c.p_ch;
    return history(c).rate();
}

BorrowingMethod borrowing_method(const RunConfig& c) {
    BorrowingMethod m;
    if (c.method == "eb") m = EmpiricalBayes{};
    else if (c.method == "bp") m = BayesianP{c.eta.value_or(1.0)};
    else if (c.method == "gbc") m = GeneralizedBC{c.theta, c.eta.value_or(1.0)};
    else if (c.method == "jsd") m = JensenShannon{c.eta.value_or(2.0)};
    else m = FixedWeight{};
    try {
        validate_method(m);
    } catch (const DomainError& e) {
        throw ConfigError(fmt::format("[borrowing] {}", e.what()));
    }
    return m;
}

BorrowingPolicy borrowing_policy(const RunConfig& c, const HistoricalControl& hist) {
    require(c.delta_max >= 0.0,
            fmt::format("[borrowing] delta_max must be nonnegative, got {}", c.delta_max));
    return BorrowingPolicy::for_history(borrowing_method(c), c.delta_max, hist);
}

DesignSpec design_spec(const RunConfig& c) {
    require(c.n_c.has_value(), "[design] n_c is required");
    require(c.n_t.has_value(), "[design] n_t is required");
    const HistoricalControl hist = history(c);
    try {
        DesignSpec d{*c.n_c,
                     *c.n_t,
                     BetaParams(c.prior_c.first, c.prior_c.second),
                     BetaParams(c.prior_t.first, c.prior_t.second),
                     hist,
                     borrowing_policy(c, hist),
                     c.alpha};
        d.validate();
        return d;
    } catch (const DomainError& e) {
        throw ConfigError(fmt::format("[design] {}", e.what()));
    }
}

EvaluationMethod evaluation(const RunConfig& c) {
    if (c.mode == "exact") return ExactEnumeration{};
    require(c.n_sims >= 1, "[simulation] n_sims must be at least 1");
    return MonteCarlo{c.n_sims, c.seed};
}

std::vector<Scenario> scenarios(const RunConfig& c) {
    const double p_ch = historical_rate(c);
    std::vector<Scenario> out;
    for (double p_c : c.p_c) {
        require_rate(p_c, "[scenarios] p_c");
        for (double v : c.p_t) {
            const double p_t = c.p_t_rule == "offset" ? p_c + v : v;
            require_rate(p_t, fmt::format("[scenarios] p_t for p_c={}", p_c));
            out.push_back({p_c, p_t, p_ch});
        }
    }
    return out;
}

double null_rate(const RunConfig& c) {
    const double p = c.p_null ? *c.p_null : historical_rate(c);
    require(p > 0.0 && p < 1.0, fmt::format("[simulation] p_null must lie in (0, 1), got {}", p));
    return p;
}

OptimizationConstraints constraints(const RunConfig& c) {
    OptimizationConstraints k;
    k.target_power = c.target_power;
    k.alpha = c.alpha;
    k.max_mean_pmd = c.max_mean_pmd;
    k.max_xi = c.max_xi;
    k.xi_eps = c.eps;
    k.discrepancy_band = c.band;
    k.power_offset = c.power_offset;
    try {
        k.validate();
    } catch (const DomainError& e) {
        throw ConfigError(fmt::format("[optimize] {}", e.what()));
    }
    return k;
}

SearchSetting search_setting(const RunConfig& c) {
    const HistoricalControl hist = history(c);
    SearchSetting s;
    try {
        s.prior_c = BetaParams(c.prior_c.first, c.prior_c.second);
        s.prior_t = BetaParams(c.prior_t.first, c.prior_t.second);
    } catch (const DomainError& e) {
        throw ConfigError(fmt::format("[design] {}", e.what()));
    }
    s.y_ch = hist.responders();
    s.n_ch = hist.size();
    s.p_hat_ch = null_rate(c);
    s.method = borrowing_method(c);
    require(c.delta_max >= 0.0,
            fmt::format("[borrowing] delta_max must be nonnegative, got {}", c.delta_max));
    s.delta_max = c.delta_max;
    s.evaluation = evaluation(c);
    return s;
}

}  // namespace dpp::cli
