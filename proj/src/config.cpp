#include "sfcabm/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace sfcabm {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos) {
            return out;
        }
        start = pos + 1;
    }
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        throw ConfigError(std::string(key) + ": cannot parse '" + std::string(text) + "'", 0,
                          std::string(key));
    }
    return value;
}

using Setter = std::function<void(ScenarioConfig&, std::string_view key, std::string_view value)>;

template <typename T>
Setter number_field(T SimParams::*member) {
    return [member](ScenarioConfig& c, std::string_view k, std::string_view v) {
        c.params.*member = parse_number<T>(k, v);
    };
}

const std::vector<std::pair<std::string_view, Setter>>& setters() {
    static const std::vector<std::pair<std::string_view, Setter>> table = {
        {"n_workers", number_field(&SimParams::n_workers)},
        {"n_firms_init", number_field(&SimParams::n_firms_init)},
        {"wage", number_field(&SimParams::wage)},
        {"price", number_field(&SimParams::price)},
        {"interest_rate", number_field(&SimParams::interest_rate)},
        {"gamma", number_field(&SimParams::gamma)},
        {"nu", number_field(&SimParams::nu)},
        {"mu_min", number_field(&SimParams::mu_min)},
        {"mu_max", number_field(&SimParams::mu_max)},
        {"init_unemployment", number_field(&SimParams::init_unemployment)},
        {"init_debt_max", number_field(&SimParams::init_debt_max)},
        {"iterations", number_field(&SimParams::iterations)},
        {"seed",
         [](ScenarioConfig& c, std::string_view k, std::string_view v) {
             c.params.seed = parse_number<std::uint64_t>(k, v);
             c.seeds = {c.params.seed};
         }},
        {"entry_size_min", number_field(&SimParams::entry_size_min)},
        {"entry_size_max", number_field(&SimParams::entry_size_max)},
        {"burn_in",
         [](ScenarioConfig& c, std::string_view k, std::string_view v) {
             c.burn_in = parse_number<std::int64_t>(k, v);
         }},
        {"snapshot_times",
         [](ScenarioConfig& c, std::string_view k, std::string_view v) {
             c.snapshot_times.clear();
             if (trim(v).empty()) {
                 return;
             }
             for (const auto item : split(v, ',')) {
                 c.snapshot_times.push_back(parse_number<std::int64_t>(k, item));
             }
         }},
        {"seeds",
         [](ScenarioConfig& c, std::string_view, std::string_view v) {
             c.seeds = parse_seed_list(v);
         }},
        {"output_dir",
         [](ScenarioConfig& c, std::string_view, std::string_view v) { c.output_dir = std::string(v); }},
        {"growth_lag",
         [](ScenarioConfig& c, std::string_view k, std::string_view v) {
             c.growth_lag = parse_number<std::int64_t>(k, v);
         }},
        {"powerlaw_xmin_quantile",
         [](ScenarioConfig& c, std::string_view k, std::string_view v) {
             c.powerlaw_xmin_quantile = parse_number<double>(k, v);
         }},
    };
    return table;
}

const Setter* find_setter(std::string_view key) {
    for (const auto& [name, setter] : setters()) {
        if (name == key) {
            return &setter;
        }
    }
    return nullptr;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    std::vector<std::size_t> prev(b.size() + 1);
    std::vector<std::size_t> cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) {
        prev[j] = j;
    }
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

void validate_named(const ScenarioConfig& c) {
    try {
        c.validate();
    } catch (const std::invalid_argument& ex) {
        const std::string msg = ex.what();
        throw ConfigError("validation error: " + msg, 0, msg.substr(0, msg.find(':')));
    }
}

} // namespace

void ScenarioConfig::validate() const {
    params.validate();
    if (burn_in < 0 || burn_in >= params.iterations) {
        throw std::invalid_argument("burn_in: must lie in [0, iterations)");
    }
    if (seeds.empty()) {
        throw std::invalid_argument("seeds: must not be empty");
    }
    if (growth_lag < 1) {
        throw std::invalid_argument("growth_lag: must be >= 1");
    }
    if (!(powerlaw_xmin_quantile >= 0.0 && powerlaw_xmin_quantile < 1.0)) {
        throw std::invalid_argument("powerlaw_xmin_quantile: must lie in [0, 1)");
    }
    for (const auto t : snapshot_times) {
        if (t < 0 || t >= params.iterations) {
            throw std::invalid_argument("snapshot_times: every time must lie in [0, iterations)");
        }
    }
}

const std::vector<std::string_view>& config_keys() {
    static const std::vector<std::string_view> keys = [] {
        std::vector<std::string_view> out;
        for (const auto& [name, setter] : setters()) {
            out.push_back(name);
        }
        return out;
    }();
    return keys;
}

std::string suggest_key(std::string_view unknown) {
    std::string best;
    std::size_t best_score = std::string::npos;
    for (const auto key : config_keys()) {
        std::size_t score = edit_distance(unknown, key);
        if (key.starts_with(unknown) || unknown.starts_with(key)) {
            score = std::min<std::size_t>(score, 1);
        }
        if (score < best_score) {
            best_score = score;
            best = std::string(key);
        }
    }
    return best_score <= std::max<std::size_t>(3, unknown.size() / 2) ? best : std::string{};
}

std::vector<std::uint64_t> parse_seed_list(std::string_view text) {
    std::vector<std::uint64_t> out;
    for (const auto item : split(text, ',')) {
        if (item.empty()) {
            throw ConfigError("seeds: empty list item", 0, "seeds");
        }
        const auto dots = item.find("..");
        if (dots == std::string_view::npos) {
            out.push_back(parse_number<std::uint64_t>("seeds", item));
            continue;
        }
        const auto lo = parse_number<std::uint64_t>("seeds", trim(item.substr(0, dots)));
        const auto hi = parse_number<std::uint64_t>("seeds", trim(item.substr(dots + 2)));
        if (lo > hi) {
            throw ConfigError("seeds: range " + std::string(item) + " is decreasing", 0, "seeds");
        }
        for (std::uint64_t s = lo; s <= hi; ++s) {
            out.push_back(s);
        }
    }
    return out;
}

ScenarioConfig load_config(std::string_view text) {
    static const std::vector<std::string_view> required = {
        "n_workers", "n_firms_init", "interest_rate", "nu", "mu_min", "mu_max", "iterations"};

    ScenarioConfig config;
    std::set<std::string, std::less<>> seen;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto end = std::min(text.find('\n', start), text.size());
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'", line_no);
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        const Setter* setter = find_setter(key);
        if (setter == nullptr) {
            std::string msg = "line " + std::to_string(line_no) + ": unknown key '" +
                              std::string(key) + "'";
            if (const auto hint = suggest_key(key); !hint.empty()) {
                msg += " (did you mean '" + hint + "'?)";
            }
            throw ConfigError(msg, line_no, std::string(key));
        }
        if (!seen.insert(std::string(key)).second) {
            throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" +
                                  std::string(key) + "'",
                              line_no, std::string(key));
        }
        try {
            (*setter)(config, key, value);
        } catch (const ConfigError& ex) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + ex.what(), line_no,
                              std::string(key));
        }
        if (end == text.size()) {
            break;
        }
    }
    for (const auto key : required) {
        if (!seen.contains(key)) {
            throw ConfigError("missing required key '" + std::string(key) + "'", 0, std::string(key));
        }
    }
    // `seeds` wins over `seed` regardless of order.
    if (!seen.contains("seeds") && seen.contains("seed")) {
        config.seeds = {config.params.seed};
    }
    if (!seen.contains("init_debt_max")) {
        config.params.init_debt_max = config.params.wage;
    }
    validate_named(config);
    return config;
}

ScenarioConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_config(buf.str());
}

void set_config_key(ScenarioConfig& config, std::string_view key, std::string_view value) {
    const Setter* setter = find_setter(trim(key));
    if (setter == nullptr) {
        std::string msg = "unknown key '" + std::string(key) + "'";
        if (const auto hint = suggest_key(trim(key)); !hint.empty()) {
            msg += " (did you mean '" + hint + "'?)";
        }
        throw ConfigError(msg, 0, std::string(key));
    }
    (*setter)(config, trim(key), trim(value));
}

void apply_override(ScenarioConfig& config, std::string_view key, std::string_view value) {
    set_config_key(config, key, value);
    validate_named(config);
}

} // namespace sfcabm
