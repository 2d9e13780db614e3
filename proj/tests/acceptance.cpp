// Acceptance criteria runner. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails. Optional argument: scratch directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "sfcabm/io.hpp"
#include "sfcabm/markets.hpp"
#include "sfcabm/scenarios.hpp"

using namespace sfcabm;
namespace fs = std::filesystem;

namespace {

constexpr int n_seeds = 5;

int failures = 0;

void report(const char* id, bool ok, const std::string& detail) {
    std::printf("%s %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    failures += ok ? 0 : 1;
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

std::vector<std::uint64_t> seeds() {
    std::vector<std::uint64_t> s;
    for (std::uint64_t i = 1; i <= n_seeds; ++i) {
        s.push_back(i);
    }
    return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<SeedSummary> run_preset(const std::string& name, const fs::path& out) {
    ScenarioConfig c = preset(name);
    c.seeds = seeds();
    c.output_dir = out / name;
    return run_scenario(c).seeds;
}

double max_residual(const std::vector<SeedSummary>& runs) {
    double worst = 0.0;
    for (const auto& s : runs) {
        worst = std::max(worst, s.max_abs_residual);
    }
    return worst;
}

void ac10_allocator() {
    Rng rng(20240610);
    constexpr int trials = 100000;
    const std::vector<std::int64_t> w{100, 100};
    std::vector<double> xs;
    xs.reserve(trials);
    int exact = 0;
    for (int i = 0; i < trials; ++i) {
        const auto a = allocate_without_replacement(w, 100, rng);
        exact += (a[0] + a[1] == 100 && a[0] <= 100 && a[1] <= 100) ? 1 : 0;
        xs.push_back(static_cast<double>(a[0]));
    }
    const double mean_true = 50.0;
    const double var_true = 100.0 * 0.5 * 0.5 * (200.0 - 100.0) / (200.0 - 1.0);
    const double m = mean(xs);
    const double v = variance(xs);
    double m4 = 0.0;
    for (const double x : xs) {
        m4 += std::pow(x - m, 4);
    }
    m4 /= trials;
    const double se_mean = std::sqrt(var_true / trials);
    const double se_var = std::sqrt((m4 - v * v) / trials);
    const bool ok = std::abs(m - mean_true) <= 3 * se_mean && std::abs(v - var_true) <= 3 * se_var &&
                    exact == trials;
    report("AC10", ok,
           "mean " + fmt("%.4f", m) + " (analytic 50, 3se " + fmt("%.4f", 3 * se_mean) + "), var " +
               fmt("%.4f", v) + " (analytic " + fmt("%.4f", var_true) + ", 3se " +
               fmt("%.4f", 3 * se_var) + "), exact sums " + std::to_string(exact) + "/" +
               std::to_string(trials));
}

void ac11_estimators() {
    Rng rng(777);
    constexpr int n = 10000;
    std::vector<double> xs(n);
    for (auto& x : xs) {
        x = std::pow(1.0 - rng.uniform01(), -1.0 / 1.5);
    }
    const double alpha = fit_powerlaw_ccdf(xs, 1.0).parameters[0];
    const double se = alpha / std::sqrt(static_cast<double>(n));
    const bool pl_ok = std::abs(alpha - 1.5) <= 3 * se;

    constexpr int trials = 100;
    constexpr int size = 500;
    int laplace_right = 0;
    int gauss_right = 0;
    std::vector<double> s(size);
    for (int t = 0; t < trials; ++t) {
        for (auto& x : s) {
            const double u = rng.uniform01() - 0.5;
            x = -(u < 0 ? -1.0 : 1.0) * std::log(1.0 - 2.0 * std::abs(u));
        }
        laplace_right += fit_tent(s).tent_shaped() ? 1 : 0;
        for (std::size_t i = 0; i < s.size(); i += 2) {
            const double r = std::sqrt(-2.0 * std::log(1.0 - rng.uniform01()));
            const double th = 2.0 * std::numbers::pi * rng.uniform01();
            s[i] = r * std::cos(th);
            s[i + 1] = r * std::sin(th);
        }
        gauss_right += fit_tent(s).tent_shaped() ? 0 : 1;
    }
    const bool tent_ok = laplace_right >= 99 && gauss_right >= 99;
    report("AC11", pl_ok && tent_ok,
           "pareto alpha " + fmt("%.4f", alpha) + " (true 1.5, 3se " + fmt("%.4f", 3 * se) +
               "); tent classifier laplace " + std::to_string(laplace_right) + "/100, gaussian " +
               std::to_string(gauss_right) + "/100");
}

void ac2_determinism(const fs::path& root) {
    std::ostringstream sink;
    bool ok = true;
    for (const char* d : {"a", "b"}) {
        const int code = run_cli({"sfcabm", "run", "--preset", "fig2_steady_state", "--seeds", "42",
                                  "--out", (root / "ac2" / d).string()},
                                 sink, sink);
        ok = ok && code == 0;
    }
    int files = 0;
    for (const auto& entry : fs::directory_iterator(root / "ac2" / "a" / "seed_42")) {
        if (entry.path().extension() != ".csv") {
            continue;
        }
        ++files;
        const auto other = root / "ac2" / "b" / "seed_42" / entry.path().filename();
        ok = ok && fs::exists(other) && read_file(entry.path()) == read_file(other);
    }
    report("AC2", ok && files > 0,
           std::to_string(files) + " CSV files compared byte for byte across two CLI runs");
}

} // namespace

int main(int argc, char** argv) {
    const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "sfcabm_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);

    ac10_allocator();
    ac11_estimators();
    ac2_determinism(root);

    // fig2 with gamma in {1,2,3}; the gamma=2 runs are the plain fig2 preset.
    ScenarioConfig fig2 = preset("fig2_steady_state");
    fig2.seeds = seeds();
    fig2.output_dir = root / "gamma_sweep";
    const auto t0 = std::chrono::steady_clock::now();
    {
        ScenarioConfig one = fig2;
        one.seeds = {1};
        one.output_dir = root / "timing";
        run_scenario(one, 1);
    }
    const double fig2_seconds = seconds_since(t0);
    const SweepResult gamma = run_sweep(fig2, "gamma", {1.0, 2.0, 3.0});
    const auto& fig2_runs = gamma.per_value[1].seeds;

    ScenarioConfig high_r = fig2;
    high_r.params.interest_rate = 0.075;
    high_r.output_dir = root / "fig2_r0.075";
    const auto high_r_runs = run_scenario(high_r).seeds;

    const auto fig3 = run_preset("fig3_distributions", root);
    const auto fig4a = run_preset("fig4a_wide_mu", root);
    const auto fig4b = run_preset("fig4b_narrow_mu", root);

    {
        double worst = 0.0;
        for (const auto& r : gamma.per_value) {
            worst = std::max(worst, max_residual(r.seeds));
        }
        for (const auto* runs : {&high_r_runs, &fig3, &fig4a, &fig4b}) {
            worst = std::max(worst, max_residual(*runs));
        }
        const bool ok = worst <= 1e-6 && fig2_seconds < 30.0;
        report("AC1", ok,
               "max |residual| " + fmt("%.3e", worst) +
                   " over every iteration of all presets x 5 seeds (limit 1e-6); fig2 single run " +
                   fmt("%.2f", fig2_seconds) + " s (limit 30 s)");
    }

    {
        std::vector<double> u, nf;
        for (const auto& s : fig2_runs) {
            u.push_back(s.unemployment.mean);
            nf.push_back(s.active_firms.mean);
        }
        const double mu = mean(u);
        const double mnf = mean(nf);
        bool stationary = true;
        bool fluctuating = true;
        bool losses = true;
        std::string jl;
        for (const auto& s : fig2_runs) {
            stationary = stationary && s.unemployment.mean <= 2 * mu && s.unemployment.mean >= mu / 2 &&
                         s.active_firms.mean <= 2 * mnf && s.active_firms.mean >= mnf / 2;
            fluctuating = fluctuating && s.unemployment.variance > 0 && s.active_firms.variance > 0;
            losses = losses && s.job_loss_rate >= 0.003 && s.job_loss_rate <= 0.03;
            jl += (jl.empty() ? "" : ",") + fmt("%.4f", s.job_loss_rate);
        }
        report("AC3", stationary && fluctuating && losses,
               "cross-seed mean unemployment " + fmt("%.4f", mu) + ", firms " + fmt("%.1f", mnf) +
                   ", per-seed means within x2: " + (stationary ? "yes" : "no") +
                   "; job loss rate per seed [" + jl + "] (accept [0.003, 0.03])");
    }

    {
        int in_range = 0;
        std::string alphas;
        for (const auto& s : fig3) {
            std::string a = "none";
            for (const auto& snap : s.snapshots) {
                if (snap.t != 750) {
                    continue;
                }
                if (snap.size_fit) {
                    const double alpha = snap.size_fit->parameters[0];
                    a = fmt("%.3f", alpha);
                    in_range += (alpha >= powerlaw_alpha_low && alpha <= powerlaw_alpha_high) ? 1 : 0;
                } else {
                    a = "fit failed (" + snap.size_fit_error + ")";
                }
            }
            alphas += (alphas.empty() ? "" : "; ") + a;
        }
        report("AC4", in_range == n_seeds,
               "fig3 t=750 CCDF exponent per seed [" + alphas + "], in [0.5, 2.3]: " +
                   std::to_string(in_range) + "/5");
    }

    {
        int tents = 0;
        std::string detail;
        for (const auto& s : fig3) {
            const auto& f = s.growth.fit;
            const bool tent = f && f->tent_shaped() && f->excess_kurtosis > 1.0;
            tents += tent ? 1 : 0;
            detail += (detail.empty() ? "" : ",") +
                      (f ? fmt("%.2f", f->excess_kurtosis) : std::string("n/a"));
        }
        report("AC5", tents >= 4,
               "fig3 pooled growth: Laplace preferred with excess kurtosis > 1 in " +
                   std::to_string(tents) + "/5 seeds (need 4); kurtosis [" + detail + "]");
    }

    {
        int var_wider = 0;
        int narrow_higher = 0;
        for (int i = 0; i < n_seeds; ++i) {
            var_wider += fig4a[i].unemployment.variance > fig4b[i].unemployment.variance ? 1 : 0;
            narrow_higher += fig4b[i].unemployment.mean > fig4a[i].unemployment.mean ? 1 : 0;
        }
        report("AC6", var_wider >= 3 && narrow_higher >= 3,
               "unemployment variance wide > narrow in " + std::to_string(var_wider) +
                   "/5 pairs; mean narrow > wide in " + std::to_string(narrow_higher) + "/5 pairs");
    }

    {
        std::vector<double> debt;
        for (const auto& r : gamma.per_value) {
            std::vector<double> d;
            for (const auto& s : r.seeds) {
                d.push_back(s.aggregate_debt.mean);
            }
            debt.push_back(mean(d));
        }
        report("AC7", debt[0] < debt[1] && debt[1] < debt[2],
               "mean aggregate debt gamma=1 " + fmt("%.1f", debt[0]) + ", gamma=2 " +
                   fmt("%.1f", debt[1]) + ", gamma=3 " + fmt("%.1f", debt[2]));
    }

    {
        int shorter = 0;
        std::vector<double> lo, hi;
        for (int i = 0; i < n_seeds; ++i) {
            lo.push_back(fig2_runs[i].mean_lifetime);
            hi.push_back(high_r_runs[i].mean_lifetime);
            shorter += high_r_runs[i].mean_lifetime < fig2_runs[i].mean_lifetime ? 1 : 0;
        }
        report("AC8", shorter == n_seeds,
               "mean lifetime r=0.011 " + fmt("%.2f", mean(lo)) + ", r=0.075 " + fmt("%.2f", mean(hi)) +
                   "; shorter at high r in " + std::to_string(shorter) + "/5 seeds");
    }

    {
        int negative = 0;
        std::string detail;
        for (const auto& s : fig3) {
            const double c = s.growth.size_growth_correlation;
            negative += (std::isfinite(c) && c < 0.0) ? 1 : 0;
            detail += (detail.empty() ? "" : ",") + fmt("%.3f", c);
        }
        report("AC9", negative >= 4,
               "fig3 pooled corr(log size, growth) negative in " + std::to_string(negative) +
                   "/5 seeds [" + detail + "]");
    }

    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
