// Command line front end: closed-form theory, simulation, single fits,
// batch statistics, convergence series, and full scenario reproduction.
//
// Exit codes: 0 success, 1 invalid flags/config, 2 numerical failure,
// 3 at least one acceptance band failed.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "arident/arident.hpp"

namespace {

using namespace arident;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitBandFailure = 3;

/// Scenario flags shared by every subcommand.  A scenario comes either
/// from --config/--scenario or from the flag defaults; explicitly passed
/// flags override the loaded scenario field by field.
class ScenarioOptions {
  public:
    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path_, "scenario configuration file");
        cmd->add_option("--scenario", scenario_name_,
                        "scenario name inside --config");
        opt_lambda_ = cmd->add_option("--lambda", flags_.lambda,
                                      "pole of the recursion, |lambda| < 1");
        opt_qbar_ = cmd->add_option("--qbar", flags_.qbar, "process input mean");
        opt_delta2_ =
            cmd->add_option("--delta2", flags_.delta2, "process input variance");
        opt_vbar_ = cmd->add_option("--vbar", flags_.vbar, "measurement noise mean");
        opt_xi2_ =
            cmd->add_option("--xi2", flags_.xi2, "measurement noise variance");
        opt_noise_ = cmd->add_option("--noise", noise_token_,
                                     "input kind: white | colored:<coeff>");
        opt_n_ = cmd->add_option("--n", flags_.n, "base trajectory length");
        opt_alpha_ =
            cmd->add_option("--alpha", flags_.alpha, "length multiplier (n * alpha)");
        opt_kappa_ = cmd->add_option("--kappa", flags_.kappa, "number of batches");
        opt_order_ = cmd->add_option("--order", flags_.order, "predictor order, 1 or 2");
        opt_seed_ = cmd->add_option("--seed", flags_.seed, "master seed");
        opt_burn_in_ = cmd->add_option("--burn-in", flags_.burn_in,
                                       "samples discarded before recording");
    }

    ScenarioConfig resolve() const {
        ScenarioConfig sc;
        if (!config_path_.empty()) {
            const std::vector<ScenarioConfig> scenarios = load_config(config_path_);
            if (!scenario_name_.empty()) {
                bool found = false;
                for (const ScenarioConfig& candidate : scenarios) {
                    if (candidate.name == scenario_name_) {
                        sc = candidate;
                        found = true;
                        break;
                    }
                }
                if (!found) {
                    throw spec_error("scenario '" + scenario_name_ +
                                     "' not found in " + config_path_);
                }
            } else if (scenarios.size() == 1) {
                sc = scenarios.front();
            } else {
                throw spec_error("config defines " +
                                 std::to_string(scenarios.size()) +
                                 " scenarios; select one with --scenario");
            }
        } else {
            sc.name = "cli";
        }

        if (opt_lambda_->count() != 0) sc.lambda = flags_.lambda;
        if (opt_qbar_->count() != 0) sc.qbar = flags_.qbar;
        if (opt_delta2_->count() != 0) sc.delta2 = flags_.delta2;
        if (opt_vbar_->count() != 0) sc.vbar = flags_.vbar;
        if (opt_xi2_->count() != 0) sc.xi2 = flags_.xi2;
        if (opt_noise_->count() != 0) {
            const auto [kind, coeff] = parse_noise_token(noise_token_);
            sc.noise = kind;
            sc.noise_coeff = coeff;
        }
        if (opt_n_->count() != 0) sc.n = flags_.n;
        if (opt_alpha_->count() != 0) sc.alpha = flags_.alpha;
        if (opt_kappa_->count() != 0) sc.kappa = flags_.kappa;
        if (opt_order_->count() != 0) sc.order = flags_.order;
        if (opt_seed_->count() != 0) sc.seed = flags_.seed;
        if (opt_burn_in_->count() != 0) sc.burn_in = flags_.burn_in;

        validate_scenario(sc);
        return sc;
    }

    const std::string& config_path() const { return config_path_; }
    const std::string& scenario_name() const { return scenario_name_; }

  private:
    std::string config_path_;
    std::string scenario_name_;
    std::string noise_token_;
    ScenarioConfig flags_;
    CLI::Option* opt_lambda_ = nullptr;
    CLI::Option* opt_qbar_ = nullptr;
    CLI::Option* opt_delta2_ = nullptr;
    CLI::Option* opt_vbar_ = nullptr;
    CLI::Option* opt_xi2_ = nullptr;
    CLI::Option* opt_noise_ = nullptr;
    CLI::Option* opt_n_ = nullptr;
    CLI::Option* opt_alpha_ = nullptr;
    CLI::Option* opt_kappa_ = nullptr;
    CLI::Option* opt_order_ = nullptr;
    CLI::Option* opt_seed_ = nullptr;
    CLI::Option* opt_burn_in_ = nullptr;
};

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) {
        throw spec_error("cannot write output file: " + out_path);
    }
    out << text;
}

std::string report_json_text(const RunReport& report) {
    return to_json(report).dump(2) + "\n";
}

int run_theory(const ScenarioOptions& opts, const std::string& out,
               const std::string& format) {
    const ScenarioConfig sc = opts.resolve();
    const RunReport report = theory_report(sc);
    if (format == "csv") {
        // Long enough to show the geometric tail, not just the fitted lags.
        const CovarianceSeq cov = covariance_for(system_params(sc), 10);
        std::ostringstream os;
        write_covariance_csv(os, cov);
        emit(out, os.str());
    } else {
        emit(out, report_json_text(report));
    }
    return all_checks_pass(report) ? kExitOk : kExitBandFailure;
}

int run_simulate(const ScenarioOptions& opts, const std::string& out,
                 const std::string& format) {
    const ScenarioConfig sc = opts.resolve();
    const Trajectory traj = simulate(system_params(sc), sc.effective_n(),
                                     sc.burn_in, SeededStream{sc.seed, 0});
    if (format == "json") {
        nlohmann::json j{{"scenario", sc.name},
                         {"seed", sc.seed},
                         {"n", traj.values.size()},
                         {"values", traj.values}};
        emit(out, j.dump(2) + "\n");
    } else {
        std::ostringstream os;
        write_trajectory_csv(os, traj);
        emit(out, os.str());
    }
    return kExitOk;
}

int run_fit(const ScenarioOptions& opts, const std::string& out,
            const std::string& format) {
    const ScenarioConfig sc = opts.resolve();
    const RunReport report = fit_report(sc);
    if (format == "csv") {
        std::ostringstream os;
        os << (sc.order == 2 ? "batch_index,phi1,phi2" : "batch_index,phi1") << '\n';
        os << 0 << ',' << format_double(report.single->coeffs[0]);
        if (sc.order == 2) os << ',' << format_double(report.single->coeffs[1]);
        os << '\n';
        emit(out, os.str());
    } else {
        emit(out, report_json_text(report));
    }
    return all_checks_pass(report) ? kExitOk : kExitBandFailure;
}

int run_batch(const ScenarioOptions& opts, const std::string& out,
              const std::string& format) {
    const ScenarioConfig sc = opts.resolve();
    const RunReport report = batch_report(sc);
    if (format == "csv") {
        std::ostringstream os;
        write_batches_csv(os, *report.batch);
        emit(out, os.str());
    } else {
        emit(out, report_json_text(report));
    }
    return all_checks_pass(report) ? kExitOk : kExitBandFailure;
}

int run_series(const ScenarioOptions& opts, const std::string& out,
               const std::string& format) {
    const ScenarioConfig sc = opts.resolve();
    const RunReport report = batch_report(sc);
    const BatchSummary& summary = *report.batch;
    if (format == "json") {
        nlohmann::json rows = nlohmann::json::array();
        const std::size_t p = static_cast<std::size_t>(summary.order);
        for (std::size_t k = 1; k <= summary.estimates.size(); ++k) {
            const std::vector<double> mean =
                coefficient_mean(summary.estimates, k, summary.order);
            const Mat2 var =
                coefficient_variance(summary.estimates, k, summary.order, mean);
            nlohmann::json row{{"batch", k},
                               {"coeffs", summary.estimates[k - 1].coeffs},
                               {"running_mean", mean}};
            std::vector<double> diag(p);
            for (std::size_t j = 0; j < p; ++j) diag[j] = var[j][j];
            row["running_var"] = diag;
            rows.push_back(row);
        }
        nlohmann::json j{{"scenario", sc.name}, {"rows", rows}};
        emit(out, j.dump(2) + "\n");
    } else {
        std::ostringstream os;
        write_series_csv(os, summary);
        emit(out, os.str());
    }
    return all_checks_pass(report) ? kExitOk : kExitBandFailure;
}

int run_reproduce(const std::string& config_path, const std::string& scenario_name,
                  const std::string& out_dir) {
    std::vector<ScenarioConfig> scenarios = load_config(config_path);
    if (!scenario_name.empty()) {
        std::vector<ScenarioConfig> picked;
        for (const ScenarioConfig& sc : scenarios) {
            if (sc.name == scenario_name) picked.push_back(sc);
        }
        if (picked.empty()) {
            throw spec_error("scenario '" + scenario_name + "' not found in " +
                             config_path);
        }
        scenarios = std::move(picked);
    }

    const std::vector<RunReport> reports = run_scenarios(scenarios);

    std::filesystem::create_directories(out_dir);
    for (const RunReport& report : reports) {
        const std::string stem = out_dir + "/" + report.scenario.name;
        emit(stem + ".report.json", report_json_text(report));
        std::ostringstream batches;
        write_batches_csv(batches, *report.batch);
        emit(stem + ".batches.csv", batches.str());
        std::ostringstream series;
        write_series_csv(series, *report.batch);
        emit(stem + ".series.csv", series.str());
    }

    std::size_t total = 0;
    std::size_t failed = 0;
    for (const RunReport& report : reports) {
        for (const CheckResult& check : report.checks) {
            ++total;
            if (!check.pass) ++failed;
            std::cout << (check.pass ? "[PASS] " : "[FAIL] ")
                      << report.scenario.name << " :: " << check.name << " :: "
                      << check.detail << '\n';
        }
    }
    std::cout << (total - failed) << '/' << total << " checks passed across "
              << reports.size() << " scenarios; artifacts in " << out_dir << '\n';
    return failed == 0 ? kExitOk : kExitBandFailure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"First-order stochastic system: exact second-order statistics, "
                 "optimal low-order predictors, and batch least-squares checks"};
    app.require_subcommand(1);

    struct Command {
        CLI::App* cmd = nullptr;
        ScenarioOptions opts;
        std::string out;
        std::string format;
    };

    auto make_command = [&](const char* name, const char* desc,
                            const char* default_format) {
        auto command = std::make_shared<Command>();
        command->cmd = app.add_subcommand(name, desc);
        command->format = default_format;
        command->opts.attach(command->cmd);
        command->cmd->add_option("--out", command->out, "output file (default stdout)");
        command->cmd
            ->add_option("--format", command->format, "output format: csv | json")
            ->check(CLI::IsMember({"csv", "json"}));
        return command;
    };

    auto theory = make_command("theory",
                               "closed-form moments and optimal predictor", "json");
    auto simulate = make_command("simulate", "one realisation as t,y samples", "csv");
    auto fit = make_command("fit", "least-squares fit of a single realisation",
                            "json");
    auto batch = make_command("batch", "independent batch fits and their statistics",
                              "json");
    auto series = make_command(
        "series", "running batch statistics, one row per added batch", "csv");

    CLI::App* reproduce =
        app.add_subcommand("reproduce", "run a scenario suite and verify its bands");
    std::string repro_config;
    std::string repro_scenario;
    std::string repro_out = "repro-out";
    reproduce->add_option("--config", repro_config, "scenario configuration file")
        ->required();
    reproduce->add_option("--scenario", repro_scenario,
                          "run only this scenario from the suite");
    reproduce->add_option("--out", repro_out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (theory->cmd->parsed()) {
            return run_theory(theory->opts, theory->out, theory->format);
        }
        if (simulate->cmd->parsed()) {
            return run_simulate(simulate->opts, simulate->out, simulate->format);
        }
        if (fit->cmd->parsed()) {
            return run_fit(fit->opts, fit->out, fit->format);
        }
        if (batch->cmd->parsed()) {
            return run_batch(batch->opts, batch->out, batch->format);
        }
        if (series->cmd->parsed()) {
            return run_series(series->opts, series->out, series->format);
        }
        if (reproduce->parsed()) {
            return run_reproduce(repro_config, repro_scenario, repro_out);
        }
        std::cerr << "error: no subcommand selected\n";
        return kExitValidation;
    } catch (const spec_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const non_identifiable_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}
