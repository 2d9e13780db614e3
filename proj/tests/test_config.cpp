#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "sfcabm/config.hpp"
#include "sfcabm/scenarios.hpp"

using namespace sfcabm;

namespace {

const char* minimal =
    "# required keys only\n"
    "n_workers = 5000\n"
    "n_firms_init = 50\n"
    "interest_rate = 0.02\n"
    "nu = 4\n"
    "mu_min = 0\n"
    "mu_max = 0.1\n"
    "iterations = 1000\n";

std::string with(const std::string& extra) { return std::string(minimal) + extra; }

} // namespace

TEST(Config, MinimalDocumentGetsDefaults) {
    const auto c = load_config(minimal);
    EXPECT_EQ(c.params.n_workers, 5000);
    EXPECT_EQ(c.params.nu, 4);
    EXPECT_DOUBLE_EQ(c.params.interest_rate, 0.02);
    EXPECT_DOUBLE_EQ(c.params.wage, 30.0);
    EXPECT_DOUBLE_EQ(c.params.price, 1.0);
    EXPECT_DOUBLE_EQ(c.params.gamma, 2.0);
    EXPECT_EQ(c.growth_lag, 1);
    EXPECT_EQ(c.burn_in, 500);
    EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{1}));
    EXPECT_TRUE(c.snapshot_times.empty());
}

TEST(Config, OptionalKeysAndLists) {
    const auto c = load_config(with("gamma = 3  # trailing comment\n"
                                    "seeds = 1..3, 9\n"
                                    "snapshot_times = 750, 751\n"
                                    "output_dir = runs/a\n"
                                    "powerlaw_xmin_quantile = 0.8\n"));
    EXPECT_DOUBLE_EQ(c.params.gamma, 3.0);
    EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{1, 2, 3, 9}));
    EXPECT_EQ(c.snapshot_times, (std::vector<std::int64_t>{750, 751}));
    EXPECT_EQ(c.output_dir, "runs/a");
    EXPECT_DOUBLE_EQ(c.powerlaw_xmin_quantile, 0.8);
}

TEST(Config, InvertedMarginRangeNamesMuMin) {
    try {
        auto bad = std::string(minimal);
        bad.replace(bad.find("mu_min = 0"), 10, "mu_min = 0.5");
        load_config(bad);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& ex) {
        EXPECT_EQ(ex.key(), "mu_min");
        EXPECT_NE(std::string(ex.what()).find("mu_min"), std::string::npos);
    }
}

TEST(Config, UnknownKeySuggestsClosest) {
    try {
        load_config(with("interest = 0.1\n"));
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& ex) {
        EXPECT_EQ(ex.line(), 9u);
        EXPECT_NE(std::string(ex.what()).find("interest_rate"), std::string::npos);
    }
    EXPECT_EQ(suggest_key("gama"), "gamma");
    EXPECT_EQ(suggest_key("burnin"), "burn_in");
    EXPECT_EQ(suggest_key("zzzzzzzzzzzzzzzzzzzzzzzz"), "");
}

TEST(Config, ParseErrorsCarryLineNumbers) {
    try {
        load_config("n_workers = 10\nthis line has no equals\n");
        FAIL();
    } catch (const ConfigError& ex) {
        EXPECT_EQ(ex.line(), 2u);
        EXPECT_NE(std::string(ex.what()).find("line 2"), std::string::npos);
    }
    try {
        load_config(with("gamma = two\n"));
        FAIL();
    } catch (const ConfigError& ex) {
        EXPECT_EQ(ex.line(), 9u);
        EXPECT_EQ(ex.key(), "gamma");
    }
}

TEST(Config, DuplicateAndMissingKeys) {
    EXPECT_THROW(load_config(with("nu = 3\n")), ConfigError);
    try {
        load_config("n_workers = 10\n");
        FAIL();
    } catch (const ConfigError& ex) {
        EXPECT_EQ(ex.key(), "n_firms_init");
    }
}

TEST(Config, ValidationCoversScenarioFields) {
    EXPECT_THROW(load_config(with("burn_in = 1000\n")), ConfigError);
    EXPECT_THROW(load_config(with("seeds = 3..1\n")), ConfigError);
    EXPECT_THROW(load_config(with("growth_lag = 0\n")), ConfigError);
    EXPECT_THROW(load_config(with("snapshot_times = 1000\n")), ConfigError);
    EXPECT_THROW(load_config(with("powerlaw_xmin_quantile = 1\n")), ConfigError);
    EXPECT_THROW(load_config(with("init_unemployment = 1.5\n")), ConfigError);
}

TEST(Config, SeedListSyntax) {
    EXPECT_EQ(parse_seed_list("1..10").size(), 10u);
    EXPECT_EQ(parse_seed_list("42"), (std::vector<std::uint64_t>{42}));
    EXPECT_EQ(parse_seed_list("5,3, 7"), (std::vector<std::uint64_t>{5, 3, 7}));
    EXPECT_EQ(parse_seed_list("18446744073709551615"),
              (std::vector<std::uint64_t>{18446744073709551615ull}));
    EXPECT_THROW(parse_seed_list("1,,2"), ConfigError);
    EXPECT_THROW(parse_seed_list("a..b"), ConfigError);
    EXPECT_THROW(parse_seed_list("-1"), ConfigError);
}

TEST(Config, OverridePatchesAndRevalidates) {
    auto c = load_config(minimal);
    apply_override(c, "interest_rate", "0.075");
    EXPECT_DOUBLE_EQ(c.params.interest_rate, 0.075);
    EXPECT_THROW(apply_override(c, "mu_max", "-1"), ConfigError);
    EXPECT_THROW(apply_override(c, "interst_rate", "0.1"), ConfigError);
}

TEST(Config, EveryKeyIsSettable) {
    for (const auto key : config_keys()) {
        ScenarioConfig c = load_config(minimal);
        EXPECT_NO_THROW(set_config_key(c, key, key == "output_dir"       ? "x"
                                               : key == "seeds"          ? "1..2"
                                               : key == "snapshot_times" ? "5"
                                               : key == "powerlaw_xmin_quantile" ? "0.5"
                                                                                 : "1"))
            << key;
    }
}

TEST(Presets, CaptionValues) {
    const auto fig2 = preset("fig2_steady_state");
    EXPECT_EQ(fig2.params.n_workers, 10000);
    EXPECT_DOUBLE_EQ(fig2.params.interest_rate, 0.011);
    EXPECT_DOUBLE_EQ(fig2.params.gamma, 2.0);
    EXPECT_EQ(fig2.params.nu, 8);
    EXPECT_EQ(fig2.params.iterations, 2000);
    const auto fig3 = preset("fig3_distributions");
    EXPECT_EQ(fig3.params.nu, 4);
    EXPECT_DOUBLE_EQ(fig3.params.interest_rate, 0.075);
    EXPECT_EQ(fig3.params.n_workers, 100000);
    EXPECT_NE(std::find(fig3.snapshot_times.begin(), fig3.snapshot_times.end(), 750),
              fig3.snapshot_times.end());
    const auto fig4a = preset("fig4a_wide_mu");
    const auto fig4b = preset("fig4b_narrow_mu");
    EXPECT_DOUBLE_EQ(fig4a.params.mu_min, 0.0);
    EXPECT_DOUBLE_EQ(fig4a.params.mu_max, 0.1);
    EXPECT_DOUBLE_EQ(fig4b.params.mu_min, 0.025);
    EXPECT_DOUBLE_EQ(fig4b.params.mu_max, 0.075);
    EXPECT_EQ(fig4a.params.n_workers, fig4b.params.n_workers);
    EXPECT_THROW(preset("fig5"), std::invalid_argument);
}

TEST(Presets, NamesAreUniqueAndValid) {
    std::set<std::string> names;
    for (const auto& p : presets()) {
        EXPECT_TRUE(names.insert(p.name).second);
        EXPECT_NO_THROW(p.config.validate());
        EXPECT_FALSE(p.provenance.empty());
    }
    EXPECT_EQ(names.size(), 4u);
}
