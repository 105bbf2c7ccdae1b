#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "toric/io.hpp"
#include "toric/montecarlo.hpp"
#include "toric/noise.hpp"
#include "toric/overhead.hpp"
#include "toric/scaling.hpp"

namespace {

// Shared across subcommands; flags beat environment variables beat defaults.
struct GlobalOptions {
    int workers = 1;
    std::uint64_t seed = 0;
    double tau = 0.02;
    bool dump = false;
};

void emit_report(const toric::FitReport& report, const std::string& out_path) {
    std::cout << toric::format_report(report);
    std::cout.flush();
    if (!out_path.empty()) {
        toric::write_report(out_path, report);
    }
}

void dump_line(const std::string& key, const std::string& value) {
    std::cout << key << " = " << value << '\n';
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void dump_globals(const std::string& command, const GlobalOptions& g) {
    dump_line("command", command);
    dump_line("workers", std::to_string(g.workers));
    dump_line("seed", std::to_string(g.seed));
    dump_line("tau", format_g17(g.tau));
}

double wall_seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

toric::ResultRow run_cell(int L, double p, const GlobalOptions& g,
                          std::uint64_t cell_seed, std::uint64_t trials) {
    const auto t0 = std::chrono::steady_clock::now();
    const toric::TrialConfig config{L, p, g.tau, cell_seed};
    const toric::FailureEstimate est = toric::run_batch(config, trials, g.workers);
    toric::ResultRow row;
    row.L = L;
    row.p = p;
    row.tau = g.tau;
    row.N = est.trials;
    row.N_f = est.failures;
    row.p_fail = est.p_fail;
    row.sigma = est.sigma;
    row.master_seed = cell_seed;
    row.wall_time_seconds = wall_seconds_since(t0);
    return row;
}

std::vector<toric::DataPoint> load_data(const std::string& path) {
    std::vector<toric::DataPoint> data;
    for (const toric::ResultRow& row : toric::read_rows(path)) {
        data.push_back({row.L, row.p, row.p_fail, row.sigma});
    }
    return data;
}

struct ParamSource {
    std::string report_path;
    toric::UniversalScalingParams explicit_values;
    CLI::Option* opt_A = nullptr;
    CLI::Option* opt_a = nullptr;
    CLI::Option* opt_pc0 = nullptr;
    CLI::Option* opt_nu0 = nullptr;

    void attach(CLI::App* cmd) {
        cmd->add_option("--params", report_path,
                        "fit report supplying A, a, p_c0, nu0")
            ->check(CLI::ExistingFile);
        opt_A = cmd->add_option("--A", explicit_values.A, "collapse amplitude");
        opt_a = cmd->add_option("--a", explicit_values.a, "decay constant");
        opt_pc0 = cmd->add_option("--pc0", explicit_values.p_c0, "threshold");
        opt_nu0 = cmd->add_option("--nu0", explicit_values.nu0,
                                  "correlation length exponent");
    }

    toric::UniversalScalingParams resolve() const {
        toric::UniversalScalingParams params;
        if (!report_path.empty()) {
            const toric::FitReport report = toric::read_report(report_path);
            params.A = report.value("A");
            params.a = report.value("a");
            params.p_c0 = report.value("p_c0");
            params.nu0 = report.value("nu0");
        }
        if (opt_A->count() > 0) params.A = explicit_values.A;
        if (opt_a->count() > 0) params.a = explicit_values.a;
        if (opt_pc0->count() > 0) params.p_c0 = explicit_values.p_c0;
        if (opt_nu0->count() > 0) params.nu0 = explicit_values.nu0;
        return params;
    }

    void dump() const {
        const toric::UniversalScalingParams p = resolve();
        dump_line("params_file", report_path.empty() ? "(none)" : report_path);
        dump_line("A", format_g17(p.A));
        dump_line("a", format_g17(p.a));
        dump_line("p_c0", format_g17(p.p_c0));
        dump_line("nu0", format_g17(p.nu0));
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"toric code failure rates: simulation, fits, and overhead planning"};
    app.require_subcommand(0, 1);

    GlobalOptions g;
    app.add_option("--workers", g.workers, "worker threads")
        ->envname("TORIC_WORKERS")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", g.seed, "master seed")->envname("TORIC_SEED");
    app.add_option("--tau", g.tau, "degeneracy tie-break strength")
        ->envname("TORIC_TAU");
    app.add_flag("--dump-config", g.dump,
                 "print the resolved configuration and exit");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "estimate one failure rate");
    simulate->fallthrough();
    int sim_L = 5;
    double sim_p = 0.05;
    std::uint64_t sim_trials = 100000;
    std::string sim_out;
    simulate->add_option("--L", sim_L, "lattice size (odd, >= 3)")->required();
    simulate->add_option("--p", sim_p, "physical error rate")->required();
    simulate->add_option("--trials", sim_trials, "Monte Carlo trials");
    simulate->add_option("--out", sim_out, "CSV file to append the row to");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "fill a (L, p) grid, resumable");
    sweep->fallthrough();
    std::vector<int> sweep_L;
    std::vector<double> sweep_p;
    std::uint64_t sweep_trials = 100000;
    std::string sweep_out;
    sweep->add_option("--L", sweep_L, "lattice sizes")
        ->required()
        ->delimiter(',');
    sweep->add_option("--p", sweep_p, "physical error rates")
        ->required()
        ->delimiter(',');
    sweep->add_option("--trials", sweep_trials, "trials per cell");
    sweep->add_option("--out", sweep_out, "CSV file (existing cells are kept)")
        ->required();

    // exact
    auto* exact = app.add_subcommand("exact", "exhaustive failure probability");
    exact->fallthrough();
    int exact_L = 3;
    double exact_p = 0.01;
    std::optional<int> exact_max_weight;
    std::string exact_out;
    exact->add_option("--L", exact_L, "lattice size (3, 5, or 7)")->required();
    exact->add_option("--p", exact_p, "physical error rate")->required();
    exact->add_option("--max-weight", exact_max_weight,
                      "truncate the enumeration at this error weight");
    exact->add_option("--out", exact_out, "write the report here as well");

    // fit
    auto* fit = app.add_subcommand("fit", "fit scaling forms to sweep data");
    fit->require_subcommand(1);

    auto* fit_thr = fit->add_subcommand("threshold", "near-threshold collapse fit");
    fit_thr->fallthrough();
    std::string thr_data, thr_out;
    int thr_restarts = 16;
    std::optional<double> thr_freeze_mu;
    fit_thr->add_option("--data", thr_data, "sweep CSV")
        ->required()
        ->check(CLI::ExistingFile);
    fit_thr->add_option("--restarts", thr_restarts, "jittered restarts")
        ->check(CLI::PositiveNumber);
    fit_thr->add_option("--freeze-mu", thr_freeze_mu,
                        "fix the finite-size exponent instead of fitting it");
    fit_thr->add_option("--out", thr_out, "write the report here as well");

    auto* fit_dec = fit->add_subcommand("decay", "below-threshold decay constant");
    fit_dec->fallthrough();
    std::string dec_data, dec_out;
    toric::UniversalScalingParams dec_defaults;
    double dec_A = dec_defaults.A;
    double dec_pc0 = dec_defaults.p_c0;
    double dec_nu0 = dec_defaults.nu0;
    fit_dec->add_option("--data", dec_data, "sweep CSV")
        ->required()
        ->check(CLI::ExistingFile);
    fit_dec->add_option("--A", dec_A, "collapse amplitude");
    fit_dec->add_option("--pc0", dec_pc0, "threshold");
    fit_dec->add_option("--nu0", dec_nu0, "correlation length exponent");
    fit_dec->add_option("--out", dec_out, "write the report here as well");

    auto* fit_quad = fit->add_subcommand(
        "quadratic", "ln P vs L curvature diagnostic at fixed p");
    fit_quad->fallthrough();
    std::string quad_data, quad_out;
    std::optional<double> quad_p;
    fit_quad->add_option("--data", quad_data, "sweep CSV")
        ->required()
        ->check(CLI::ExistingFile);
    fit_quad->add_option("--p", quad_p, "use only rows at this error rate");
    fit_quad->add_option("--out", quad_out, "write the report here as well");

    // predict
    auto* predict = app.add_subcommand("predict", "evaluate the scaling forms");
    predict->fallthrough();
    int pre_L = 11;
    double pre_p = 0.05;
    std::string pre_out;
    ParamSource pre_params;
    predict->add_option("--L", pre_L, "lattice size (odd, >= 3)")->required();
    predict->add_option("--p", pre_p, "physical error rate")->required();
    pre_params.attach(predict);
    predict->add_option("--out", pre_out, "write the report here as well");

    // overhead
    auto* overhead =
        app.add_subcommand("overhead", "qubit cost to reach a target p_fail");
    overhead->fallthrough();
    double ov_p = 1e-3;
    double ov_target = 1e-6;
    std::string ov_out;
    ParamSource ov_params;
    overhead->add_option("--p", ov_p, "physical error rate")->required();
    overhead->add_option("--target", ov_target, "target logical failure rate")
        ->required();
    ov_params.attach(overhead);
    overhead->add_option("--out", ov_out, "write the report here as well");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (simulate->parsed()) {
            if (g.dump) {
                dump_globals("simulate", g);
                dump_line("L", std::to_string(sim_L));
                dump_line("p", format_g17(sim_p));
                dump_line("trials", std::to_string(sim_trials));
                dump_line("out", sim_out.empty() ? "(stdout only)" : sim_out);
                return 0;
            }
            const toric::ResultRow row = run_cell(sim_L, sim_p, g, g.seed, sim_trials);
            std::cout << toric::csv_header() << '\n'
                      << toric::format_row(row) << std::endl;
            if (!sim_out.empty()) {
                toric::append_rows(sim_out, {row});
            }
            return 0;
        }

        if (sweep->parsed()) {
            if (g.dump) {
                dump_globals("sweep", g);
                std::string ls, ps;
                for (int L : sweep_L) ls += (ls.empty() ? "" : ",") + std::to_string(L);
                for (double p : sweep_p) ps += (ps.empty() ? "" : ",") + format_g17(p);
                dump_line("L", ls);
                dump_line("p", ps);
                dump_line("trials", std::to_string(sweep_trials));
                dump_line("out", sweep_out);
                return 0;
            }
            std::vector<toric::ResultRow> existing;
            if (std::filesystem::exists(sweep_out)) {
                existing = toric::read_rows(sweep_out);
            }
            auto have_cell = [&existing](int L, double p) {
                for (const toric::ResultRow& row : existing) {
                    if (row.L == L && row.p == p) {
                        return true;
                    }
                }
                return false;
            };
            std::cout << toric::csv_header() << '\n';
            const std::size_t total = sweep_L.size() * sweep_p.size();
            std::size_t done = 0;
            std::size_t skipped = 0;
            for (std::size_t i = 0; i < sweep_L.size(); ++i) {
                for (std::size_t j = 0; j < sweep_p.size(); ++j) {
                    // Cell seeds depend on grid position only, so a resumed
                    // or re-ordered sweep reproduces the exact same rows.
                    const std::uint64_t cell_index = i * sweep_p.size() + j;
                    const int L = sweep_L[i];
                    const double p = sweep_p[j];
                    ++done;
                    if (have_cell(L, p)) {
                        ++skipped;
                        std::cerr << "[" << done << "/" << total << "] L=" << L
                                  << " p=" << p << " already present, skipping\n";
                        continue;
                    }
                    const std::uint64_t cell_seed = toric::derive_seed(g.seed, cell_index);
                    const toric::ResultRow row =
                        run_cell(L, p, g, cell_seed, sweep_trials);
                    toric::append_rows(sweep_out, {row});
                    std::cout << toric::format_row(row) << std::endl;
                    std::cerr << "[" << done << "/" << total << "] L=" << L
                              << " p=" << p << " P_fail=" << row.p_fail << " ("
                              << row.wall_time_seconds << "s)\n";
                }
            }
            std::cerr << "sweep complete: " << (total - skipped) << " cells run, "
                      << skipped << " reused\n";
            return 0;
        }

        if (exact->parsed()) {
            if (g.dump) {
                dump_globals("exact", g);
                dump_line("L", std::to_string(exact_L));
                dump_line("p", format_g17(exact_p));
                dump_line("max_weight", exact_max_weight
                                            ? std::to_string(*exact_max_weight)
                                            : "(default)");
                return 0;
            }
            const toric::ExactFailureResult result = toric::exact_failure_probability(
                exact_L, exact_p, g.tau, exact_max_weight, g.workers);
            toric::FitReport report;
            report.comments.push_back("exhaustive enumeration of error chains");
            report.comments.push_back("weight total failing");
            for (int w = 0; w <= result.max_weight; ++w) {
                report.comments.push_back(
                    std::to_string(w) + " " +
                    std::to_string(result.total_chains[static_cast<std::size_t>(w)]) +
                    " " +
                    std::to_string(result.failing_chains[static_cast<std::size_t>(w)]));
            }
            report.set("L", result.L);
            report.set("p", result.p);
            report.set("tau", result.tau);
            report.set("max_weight", result.max_weight);
            report.set("truncated", result.truncated ? 1 : 0);
            report.set("p_fail", result.p_fail);
            report.set("truncation_bound", result.truncation_bound);
            emit_report(report, exact_out);
            return 0;
        }

        if (fit_thr->parsed()) {
            if (g.dump) {
                dump_globals("fit threshold", g);
                dump_line("data", thr_data);
                dump_line("restarts", std::to_string(thr_restarts));
                dump_line("freeze_mu",
                          thr_freeze_mu ? format_g17(*thr_freeze_mu) : "(fitted)");
                return 0;
            }
            toric::ThresholdFitOptions options;
            options.restarts = thr_restarts;
            options.seed = g.seed;
            options.freeze_mu = thr_freeze_mu;
            const toric::ThresholdFit result =
                toric::fit_threshold(load_data(thr_data), options);
            toric::FitReport report;
            report.comments.push_back("near-threshold collapse fit");
            report.comments.push_back(
                "model: P = A + B x + C x^2 + D L^(-1/mu), x = (p - p_c0) L^(1/nu0)");
            report.set("p_c0", result.p_c0.value, result.p_c0.uncertainty);
            report.set("nu0", result.nu0.value, result.nu0.uncertainty);
            report.set("A", result.A.value, result.A.uncertainty);
            report.set("B", result.B.value, result.B.uncertainty);
            report.set("C", result.C.value, result.C.uncertainty);
            report.set("D", result.D.value, result.D.uncertainty);
            report.set("mu", result.mu.value, result.mu.uncertainty);
            report.set("residual_chi2_per_dof", result.chi2_per_dof);
            report.set("converged_restarts", result.converged_restarts);
            emit_report(report, thr_out);
            return 0;
        }

        if (fit_dec->parsed()) {
            if (g.dump) {
                dump_globals("fit decay", g);
                dump_line("data", dec_data);
                dump_line("A", format_g17(dec_A));
                dump_line("pc0", format_g17(dec_pc0));
                dump_line("nu0", format_g17(dec_nu0));
                return 0;
            }
            const toric::DecayFit result =
                toric::fit_decay_constant(load_data(dec_data), dec_A, dec_pc0, dec_nu0);
            toric::FitReport report;
            report.comments.push_back("below-threshold decay constant fit");
            report.comments.push_back(
                "model: P = A exp(-a (p_c0 - p)^nu0 L), fit for a");
            report.set("a", result.a.value, result.a.uncertainty);
            report.set("A", dec_A);
            report.set("p_c0", dec_pc0);
            report.set("nu0", dec_nu0);
            report.set("residual_chi2_per_dof", result.chi2_per_dof);
            report.set("points_used", result.points_used);
            report.set("points_rejected", result.points_rejected);
            emit_report(report, dec_out);
            return 0;
        }

        if (fit_quad->parsed()) {
            if (g.dump) {
                dump_globals("fit quadratic", g);
                dump_line("data", quad_data);
                dump_line("p", quad_p ? format_g17(*quad_p) : "(all rows)");
                return 0;
            }
            std::vector<toric::DataPoint> data = load_data(quad_data);
            if (quad_p) {
                std::vector<toric::DataPoint> filtered;
                for (const toric::DataPoint& d : data) {
                    if (std::fabs(d.p - *quad_p) <=
                        1e-12 * std::max(1.0, std::fabs(*quad_p))) {
                        filtered.push_back(d);
                    }
                }
                data = std::move(filtered);
            }
            const toric::QuadraticLogFit result = toric::fit_quadratic_logL(data);
            toric::FitReport report;
            report.comments.push_back("curvature diagnostic");
            report.comments.push_back("model: ln P = alpha + beta L + gamma L^2");
            report.set("alpha", result.alpha.value, result.alpha.uncertainty);
            report.set("beta", result.beta.value, result.beta.uncertainty);
            report.set("gamma", result.gamma.value, result.gamma.uncertainty);
            report.set("curvature_ratio",
                       std::fabs(result.gamma.value / result.beta.value));
            report.set("residual_chi2_per_dof", result.chi2_per_dof);
            report.set("points", static_cast<double>(data.size()));
            emit_report(report, quad_out);
            return 0;
        }

        if (predict->parsed()) {
            if (g.dump) {
                dump_globals("predict", g);
                dump_line("L", std::to_string(pre_L));
                dump_line("p", format_g17(pre_p));
                pre_params.dump();
                return 0;
            }
            const toric::UniversalScalingParams params = pre_params.resolve();
            const toric::Regime regime = toric::classify_regime(pre_L, pre_p);
            toric::FitReport report;
            report.comments.push_back("scaling form evaluation");
            report.comments.push_back(std::string("regime = ") +
                                      toric::regime_name(regime));
            report.set("L", pre_L);
            report.set("p", pre_p);
            const bool ush_defined = pre_p < params.p_c0;
            if (ush_defined) {
                report.set("p_fail_ush", toric::p_fail_ush(pre_L, pre_p, params));
            }
            report.set("p_fail_lowp", toric::p_fail_lowp(pre_L, pre_p));
            if (regime == toric::Regime::UniversalScaling && ush_defined) {
                report.set("p_fail", report.value("p_fail_ush"));
            } else if (regime == toric::Regime::LowP) {
                report.set("p_fail", report.value("p_fail_lowp"));
            } else {
                report.comments.push_back(
                    "no single form applies here; both evaluations reported");
            }
            emit_report(report, pre_out);
            return 0;
        }

        if (overhead->parsed()) {
            if (g.dump) {
                dump_globals("overhead", g);
                dump_line("p", format_g17(ov_p));
                dump_line("target", format_g17(ov_target));
                ov_params.dump();
                return 0;
            }
            const toric::UniversalScalingParams params = ov_params.resolve();
            const toric::OverheadPlan plan =
                toric::plan_overhead(ov_p, ov_target, params);
            toric::FitReport report;
            report.comments.push_back("qubit overhead plan");
            report.comments.push_back(std::string("regime = ") +
                                      toric::regime_name(plan.regime));
            report.set("p", ov_p);
            report.set("target", ov_target);
            if (plan.ush) {
                report.set("ush_omega", plan.ush->omega);
                report.set("ush_l_real", plan.ush->l_real);
                report.set("ush_l_code", plan.ush->l_code);
                report.set("ush_achieved_p_fail", plan.ush->achieved_p_fail);
            }
            if (plan.lp) {
                report.set("lp_omega", plan.lp->omega);
                report.set("lp_l_real", plan.lp->l_real);
                report.set("lp_l_code", plan.lp->l_code);
                report.set("lp_achieved_p_fail", plan.lp->achieved_p_fail);
            }
            const toric::OverheadResult& pick = plan.recommended();
            report.comments.push_back(std::string("recommended = ") +
                                      toric::regime_name(pick.regime));
            report.set("omega", pick.omega);
            report.set("l_real", pick.l_real);
            report.set("l_code", pick.l_code);
            report.set("achieved_p_fail", pick.achieved_p_fail);
            emit_report(report, ov_out);
            return 0;
        }

        if (g.dump) {
            dump_globals("(none)", g);
            return 0;
        }
        std::cerr << app.help() << std::flush;
        std::cerr << "error: a subcommand is required\n";
        return 2;
    } catch (const toric::FitError& e) {
        std::cerr << "fit error: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return 2;
    } catch (const std::out_of_range& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
