#pragma once

// Command-line front end: check, simulate, fit, forecast, mc.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 non-convergence (fit)
// or non-stationarity refusal (simulate, check, mc).

#include "rhygarch/errors.hpp"
#include "rhygarch/fit.hpp"
#include "rhygarch/io.hpp"
#include "rhygarch/mc.hpp"
#include "rhygarch/model.hpp"
#include "rhygarch/risk.hpp"
#include "rhygarch/sim.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rhygarch::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kData = 3, kNotConverged = 4 };

struct RunConfig {
    std::string command;
    std::string params;       // parameter JSON file or inline object
    std::string input_path;   // series CSV
    std::string output_path;  // file (or directory for mc)
    std::string config_path;  // study configuration for mc
    std::string start_path;   // optional starting parameters for fit
    std::size_t K = kDefaultTruncation;
    std::size_t T = 1000;
    std::size_t burn_in = kDefaultBurnIn;
    std::uint64_t seed = 1;
    std::size_t threads = 0;
    std::vector<double> levels = {0.05, 0.01};
    std::string convention = "paper";
    std::string dist = "gaussian";
    std::string quantile = "standardized";
    bool latent = false;
    bool allow_nonstationary = false;
    bool drop_presample = false;

    /// Every long flag any subcommand accepts, one per field above (command excluded).
    static const std::vector<std::string>& flag_names() {
        static const std::vector<std::string> names = {
            "--params", "--data",    "--out",   "--config",  "--start",     "--K",         "--T",
            "--burn-in", "--seed",   "--threads", "--levels", "--convention", "--dist",     "--quantile",
            "--latent", "--allow-nonstationary", "--drop-presample",
        };
        return names;
    }
};

namespace detail {

inline void add_params(CLI::App* sub, RunConfig& c) {
    sub->add_option("--params", c.params, "Parameter JSON file, or an inline JSON object")->required();
}
inline void add_truncation(CLI::App* sub, RunConfig& c) {
    sub->add_option("--K", c.K, "Truncation lag of the psi expansion, integer >= 1")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 24))
        ->capture_default_str();
}
inline void add_out(CLI::App* sub, RunConfig& c, const std::string& what) {
    sub->add_option("--out", c.output_path, what);
}

inline void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw DataError("cannot open '" + path + "' for writing");
    f << text;
}

inline RhygarchParams load_valid_params(const std::string& source) {
    RhygarchParams p = load_params(source);
    if (const auto issues = validate(p); !issues.empty()) {
        std::string msg = "invalid parameters:";
        for (const auto& i : issues) msg += " " + i + ";";
        throw DataError(msg);
    }
    return p;
}

inline int run_check(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const RhygarchParams p = load_valid_params(c.params);
    const StationarityReport r = check_stationarity(p, c.K);
    write_text(c.output_path, nlohmann::json(r).dump(2) + "\n", out);
    if (!r.first_moment_ok) {
        err << "first-moment condition fails: phi * sum psi = " << r.phi_sum_psi << "\n";
        return kNotConverged;
    }
    return kOk;
}

inline int run_simulate(const RunConfig& c, std::ostream& out, std::ostream&) {
    RhygarchParams p = load_params(c.params);
    SimulateOptions opt;
    opt.burn_in = c.burn_in;
    opt.truncation = c.K;
    opt.keep_latent = c.latent;
    opt.allow_nonstationary = c.allow_nonstationary;
    SeriesPair s;
    try {
        s = simulate(p, c.T, c.seed, opt);
    } catch (const DomainError& e) {
        throw DataError(e.what());
    }
    if (c.output_path.empty()) {
        write_series(out, s, c.latent);
    } else {
        write_series(c.output_path, s, c.latent);
    }
    return kOk;
}

inline int run_fit(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const SeriesPair data = read_series(c.input_path);
    const DistKind kind = dist_kind_from_string(c.dist);
    std::optional<RhygarchParams> start;
    if (!c.start_path.empty()) start = load_params(c.start_path);
    FitOptions opt;
    opt.truncation = c.K;
    opt.seed = c.seed;
    opt.likelihood.drop_presample = c.drop_presample;
    const FitResult r = fit(data, kind, start, opt);
    write_text(c.output_path, nlohmann::json(r).dump(2) + "\n", out);
    if (!r.converged) {
        err << "fit did not converge (gradient norm " << r.grad_norm << ")\n";
        return kNotConverged;
    }
    return kOk;
}

inline int run_forecast(const RunConfig& c, std::ostream& out, std::ostream&) {
    const RhygarchParams p = load_valid_params(c.params);
    const SeriesPair data = read_series(c.input_path);
    const EsConvention conv = es_convention_from_string(c.convention);
    const QuantileScale scale = quantile_scale_from_string(c.quantile);
    const double h = forecast_h(p, data.realized, c.K);
    nlohmann::json doc = nlohmann::json::array();
    for (double a : c.levels) doc.push_back(make_forecast(h, a, p.innovation, conv, scale));
    write_text(c.output_path, doc.dump(2) + "\n", out);
    return kOk;
}

inline int run_mc(const RunConfig& c, std::ostream& out, std::ostream& err) {
    StudyConfig cfg;
    try {
        cfg = read_json_file(c.config_path).get<StudyConfig>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid study configuration: ") + e.what());
    } catch (const DomainError& e) {
        throw DataError(std::string("invalid study configuration: ") + e.what());
    }
    if (c.threads > 0) cfg.threads = c.threads;
    const McSummary s = run_study(cfg);
    const std::string table = emit_table(s, TableFormat::Text);
    if (c.output_path.empty()) {
        out << table;
    } else {
        std::filesystem::create_directories(c.output_path);
        const std::filesystem::path dir(c.output_path);
        write_text((dir / "summary.json").string(), emit_table(s, TableFormat::Json), out);
        write_text((dir / "table.txt").string(), table, out);
        write_text((dir / "table.csv").string(), emit_table(s, TableFormat::Csv), out);
    }
    err << "converged " << s.converged << " of " << s.M << " replications\n";
    return kOk;
}

}  // namespace detail

/// Builds the command tree bound to `c`. Exposed for help-text tests.
inline std::unique_ptr<CLI::App> make_app(RunConfig& c) {
    auto app = std::make_unique<CLI::App>("Realized HYGARCH(1,d,1): simulation, estimation and risk forecasting",
                                          "rhygarch");
    app->require_subcommand(1);
    app->set_help_all_flag("--help-all", "Print help for every subcommand and exit");

    auto* check = app->add_subcommand("check", "Stationarity and moment diagnostics for a parameter set");
    detail::add_params(check, c);
    detail::add_truncation(check, c);
    detail::add_out(check, c, "Write the JSON report here instead of standard output");

    auto* sim = app->add_subcommand("simulate", "Simulate returns and realized measures to CSV");
    detail::add_params(sim, c);
    sim->add_option("--T", c.T, "Number of observations kept, integer >= 1")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 30))
        ->capture_default_str();
    sim->add_option("--burn-in", c.burn_in, "Observations simulated and discarded first, integer >= 0")
        ->capture_default_str();
    detail::add_truncation(sim, c);
    sim->add_option("--seed", c.seed, "Random seed, unsigned 64-bit integer")->capture_default_str();
    detail::add_out(sim, c, "Output CSV path (standard output when omitted)");
    sim->add_flag("--latent", c.latent, "Also write the latent h, z and u columns");
    sim->add_flag("--allow-nonstationary", c.allow_nonstationary,
                  "Simulate even when phi * psi(1) >= 1 (presample log x set to 0)");

    auto* fit_cmd = app->add_subcommand("fit", "Quasi-maximum-likelihood estimation from a series CSV");
    fit_cmd->add_option("--data", c.input_path, "Series CSV with 'return' and 'realized' columns")
        ->required()
        ->check(CLI::ExistingFile);
    fit_cmd->add_option("--dist", c.dist, "Return innovation law: gaussian (GG) or student_t (tG)")
        ->check(CLI::IsMember({"gaussian", "student_t"}))
        ->capture_default_str();
    detail::add_truncation(fit_cmd, c);
    fit_cmd->add_option("--start", c.start_path, "Starting parameter JSON (data-driven default when omitted)");
    fit_cmd->add_option("--seed", c.seed, "Seed for jittered restarts, unsigned 64-bit integer")->capture_default_str();
    fit_cmd->add_flag("--drop-presample", c.drop_presample, "Exclude the first K observations from the likelihood");
    detail::add_out(fit_cmd, c, "Write the JSON fit result here instead of standard output");

    auto* fc = app->add_subcommand("forecast", "One-step-ahead variance, VaR and ES");
    detail::add_params(fc, c);
    fc->add_option("--data", c.input_path, "Series CSV whose realized column is the history")
        ->required()
        ->check(CLI::ExistingFile);
    detail::add_truncation(fc, c);
    fc->add_option("--levels", c.levels, "Tail probabilities, each in (0,1)")
        ->delimiter(',')
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    fc->add_option("--convention", c.convention, "ES convention: paper or standard")
        ->check(CLI::IsMember({"paper", "standard"}))
        ->capture_default_str();
    fc->add_option("--quantile", c.quantile, "Student-t quantile scale: standardized or raw")
        ->check(CLI::IsMember({"standardized", "raw"}))
        ->capture_default_str();
    detail::add_out(fc, c, "Write the JSON forecasts here instead of standard output");

    auto* mc = app->add_subcommand("mc", "Monte Carlo study from a JSON configuration");
    mc->add_option("--config", c.config_path, "Study configuration JSON")->required()->check(CLI::ExistingFile);
    detail::add_out(mc, c, "Results directory for summary.json, table.txt and table.csv");
    mc->add_option("--threads", c.threads, "Worker threads, integer >= 0 (0: RHYGARCH_THREADS or all cores)")
        ->capture_default_str();

    return app;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    RunConfig c;
    auto app = make_app(c);
    try {
        app->parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app->help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app->help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        if (app->get_subcommands().size() == 1) err << app->get_subcommands().front()->help();
        return kUsage;
    }
    for (const double a : c.levels)
        if (!(a > 0.0 && a < 1.0)) {
            err << "--levels entries must lie strictly inside (0,1)\n";
            return kUsage;
        }
    c.command = app->get_subcommands().front()->get_name();

    try {
        if (c.command == "check") return detail::run_check(c, out, err);
        if (c.command == "simulate") return detail::run_simulate(c, out, err);
        if (c.command == "fit") return detail::run_fit(c, out, err);
        if (c.command == "forecast") return detail::run_forecast(c, out, err);
        if (c.command == "mc") return detail::run_mc(c, out, err);
    } catch (const NonStationaryError& e) {
        err << "error: " << e.what() << "\n";
        return kNotConverged;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return kData;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kData;
    }
    return kUsage;
}

}  // namespace rhygarch::cli
