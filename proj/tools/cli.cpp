#include "cli.hpp"

#include <charconv>
#include <filesystem>
#include <ostream>
#include <regex>

#include <CLI11.hpp>

#include "sfcabm/io.hpp"
#include "sfcabm/ledger.hpp"
#include "sfcabm/scenarios.hpp"

namespace sfcabm {

namespace {

struct Options {
    std::string preset;
    std::string config_path;
    std::string seeds;
    std::string out;
    std::vector<std::string> overrides;
    unsigned jobs = 0;
    std::string axis;
    std::string values;
    std::string cross_section;
    std::string partner;
    std::int64_t growth_lag = 1;
    double xmin_quantile = 0.9;
};

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string key_list() {
    std::string keys;
    for (const auto k : config_keys()) {
        keys += (keys.empty() ? "" : ", ") + std::string(k);
    }
    return keys;
}

void add_scenario_options(CLI::App& cmd, Options& o) {
    auto* p = cmd.add_option("--preset", o.preset, "Named preset (see the presets verb)");
    auto* c = cmd.add_option("--config", o.config_path, "Config file of key = value lines")
                  ->check(CLI::ExistingFile);
    p->excludes(c);
    cmd.add_option("--seeds", o.seeds, "Seeds: inclusive range a..b or comma list");
    cmd.add_option("--out", o.out, "Output directory (config key output_dir)");
    cmd.add_option("--override", o.overrides, "Patch a config key, key=value. Keys: " + key_list());
    cmd.add_option("--jobs", o.jobs, "Maximum concurrent runs (default: hardware concurrency)")
        ->check(CLI::PositiveNumber);
}

ScenarioConfig build_config(const Options& o) {
    if (o.preset.empty() == o.config_path.empty()) {
        throw UsageError("exactly one of --preset or --config is required");
    }
    ScenarioConfig config = o.preset.empty() ? load_config_file(o.config_path) : preset(o.preset);
    for (const auto& kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw UsageError("--override expects key=value, got '" + kv + "'");
        }
        set_config_key(config, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!o.seeds.empty()) {
        config.seeds = parse_seed_list(o.seeds);
    }
    if (!o.out.empty()) {
        config.output_dir = o.out;
    }
    config.validate();
    return config;
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find(',', start);
        if (end == std::string::npos) {
            end = text.size();
        }
        const std::string item = text.substr(start, end - start);
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc{} || ptr != item.data() + item.size() || item.empty()) {
            throw UsageError("--values: cannot parse '" + item + "'");
        }
        out.push_back(v);
        start = end + 1;
    }
    return out;
}

void print_seed_lines(std::ostream& out, const ScenarioResult& r) {
    for (const auto& s : r.seeds) {
        out << "seed " << s.seed << ": unemployment " << format_double(s.unemployment.mean)
            << ", firms " << format_double(s.active_firms.mean) << ", debt "
            << format_double(s.aggregate_debt.mean) << ", job loss rate "
            << format_double(s.job_loss_rate) << "\n";
    }
}

int do_analyze(const Options& o, std::ostream& out) {
    const std::filesystem::path file = o.cross_section;
    const FirmCrossSection at = parse_cross_section_csv(read_file(file));
    std::int64_t t = -1;
    std::smatch m;
    const std::string name = file.filename().string();
    if (std::regex_match(name, m, std::regex(R"(cross_section_t(\d+)\.csv)"))) {
        t = std::stoll(m[1].str());
    }
    std::filesystem::path partner = o.partner;
    if (partner.empty() && t >= 0) {
        const auto guess =
            file.parent_path() / ("cross_section_t" + std::to_string(t + o.growth_lag) + ".csv");
        if (std::filesystem::exists(guess)) {
            partner = guess;
        }
    }
    FirmCrossSection later;
    if (!partner.empty()) {
        later = parse_cross_section_csv(read_file(partner));
    }
    const SnapshotFit fit = analyze_snapshot(t, at, partner.empty() ? nullptr : &later,
                                             o.growth_lag, o.xmin_quantile);
    const std::string text = to_json(fit).dump(2) + "\n";
    if (o.out.empty()) {
        out << text;
    } else {
        write_file(o.out, text);
    }
    return exit_ok;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stock-flow-consistent agent-based macroeconomic simulator", "sfcabm"};
    app.require_subcommand(1);
    Options o;

    auto* run = app.add_subcommand("run", "Run a scenario over its seeds and write artifacts");
    add_scenario_options(*run, o);

    auto* sweep = app.add_subcommand("sweep", "Run a scenario for each value of one parameter");
    add_scenario_options(*sweep, o);
    std::string axes;
    for (const auto a : sweepable_axes()) {
        axes += (axes.empty() ? "" : ", ") + std::string(a);
    }
    sweep->add_option("--axis", o.axis, "Parameter to sweep: " + axes)->required();
    sweep->add_option("--values", o.values, "Comma-separated values")->required();

    auto* analyze = app.add_subcommand("analyze", "Recompute fits from saved cross-section CSVs");
    analyze->add_option("--cross-section", o.cross_section, "Cross-section CSV")
        ->required()
        ->check(CLI::ExistingFile);
    analyze->add_option("--partner", o.partner,
                        "Cross-section lag iterations later (default: found next to the input)")
        ->check(CLI::ExistingFile);
    analyze->add_option("--growth-lag", o.growth_lag, "Iterations between the two cross-sections")
        ->check(CLI::PositiveNumber);
    analyze->add_option("--xmin-quantile", o.xmin_quantile, "Size quantile used as power-law x_min")
        ->check(CLI::Range(0.0, 1.0));
    analyze->add_option("--out", o.out, "Write the JSON here instead of stdout");

    auto* list = app.add_subcommand("presets", "List presets and the figures they reproduce");

    std::vector<std::string> argv_rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(argv_rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& ex) {
        err << "error: " << ex.what() << "\n" << app.help();
        return exit_usage;
    }

    try {
        if (list->parsed()) {
            for (const auto& p : presets()) {
                out << p.name << "  " << p.provenance << "\n";
            }
            return exit_ok;
        }
        if (analyze->parsed()) {
            return do_analyze(o, out);
        }
        const ScenarioConfig config = build_config(o);
        if (run->parsed()) {
            const auto result = run_scenario(config, o.jobs);
            print_seed_lines(out, result);
            out << "wrote " << config.output_dir.string() << "\n";
        } else {
            const auto values = parse_values(o.values);
            const auto result = run_sweep(config, o.axis, values, o.jobs);
            for (std::size_t i = 0; i < values.size(); ++i) {
                out << o.axis << "=" << format_short(values[i]) << "\n";
                print_seed_lines(out, result.per_value[i]);
            }
            out << "wrote " << config.output_dir.string() << "\n";
        }
        return exit_ok;
    } catch (const UsageError& ex) {
        err << "error: " << ex.what() << "\n";
        return exit_usage;
    } catch (const AuditFailure& ex) {
        err << "audit failure: " << ex.what() << "\n";
        return exit_audit;
    } catch (const std::exception& ex) {
        err << "error: " << ex.what() << "\n";
        return exit_failure;
    }
}

} // namespace sfcabm
