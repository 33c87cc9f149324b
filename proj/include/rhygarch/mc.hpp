#pragma once

// Monte Carlo study harness: simulate -> fit -> forecast per replication,
// then Mean / MSE per parameter and per risk quantity.

#include "rhygarch/dist.hpp"
#include "rhygarch/fit.hpp"
#include "rhygarch/model.hpp"
#include "rhygarch/risk.hpp"
#include "rhygarch/sim.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace rhygarch {

struct StudyConfig {
    std::string label = "study";
    RhygarchParams model = model1_params();
    DistKind fit_dist = DistKind::Gaussian;
    std::size_t T = 1000;
    std::size_t M = 100;
    std::size_t truncation = kDefaultTruncation;
    std::size_t burn_in = kDefaultBurnIn;
    std::vector<double> levels = {0.05, 0.01};
    std::vector<EsConvention> conventions = {EsConvention::Paper};
    QuantileScale scale = QuantileScale::Standardized;
    std::uint64_t master_seed = 1;
    bool fit_enabled = true;  // false: evaluate every replication at the true parameters
    std::size_t threads = 0;  // 0: RHYGARCH_THREADS, else hardware concurrency
    FitOptions fit_options{};
};

struct McRow {
    std::string name;
    double true_value = 0.0;
    double mean = 0.0;
    double mse = 0.0;
};

struct Replication {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    bool converged = false;
    double grad_norm = 0.0;
    std::vector<double> estimates;  // row order of McSummary::rows
    std::vector<double> risk_truth;
    std::vector<double> risk_estimate;
};

struct McSummary {
    std::string model_label;
    std::size_t T = 0;
    std::size_t M = 0;
    std::vector<McRow> rows;
    std::vector<McRow> risk_rows;
    double convergence_rate = 0.0;
    std::size_t converged = 0;
    std::uint64_t master_seed = 0;
    std::vector<Replication> replications;

    const McRow* find(const std::string& name) const {
        for (const auto* group : {&rows, &risk_rows})
            for (const auto& r : *group)
                if (r.name == name) return &r;
        return nullptr;
    }
};

/// Row order of the published tables: nu sits between d and xi.
inline std::vector<std::string> table_parameter_names(DistKind kind) {
    std::vector<std::string> names = {"omega", "gamma", "beta", "delta", "d"};
    if (kind == DistKind::StudentT) names.emplace_back("nu");
    for (const char* n : {"xi", "phi", "tau1", "tau2", "sigma_u"}) names.emplace_back(n);
    return names;
}

inline double parameter_value(const RhygarchParams& p, const std::string& name) {
    if (name == "omega") return p.omega;
    if (name == "gamma") return p.gamma;
    if (name == "beta") return p.beta;
    if (name == "delta") return p.delta;
    if (name == "d") return p.d;
    if (name == "nu") return p.innovation.is_student() ? p.innovation.nu : std::numeric_limits<double>::infinity();
    if (name == "xi") return p.xi;
    if (name == "phi") return p.phi;
    if (name == "tau1") return p.tau1;
    if (name == "tau2") return p.tau2;
    if (name == "sigma_u") return p.sigma_u;
    throw DomainError("unknown parameter name '" + name + "'");
}

/// "5%", "1%", "2.5%".
inline std::string level_label(double alpha) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g%%", alpha * 100.0);
    return buf;
}

namespace detail {

struct RiskSlot {
    std::string name;
    double level;
    bool is_var;
    EsConvention convention;
};

inline std::vector<RiskSlot> risk_slots(const StudyConfig& cfg) {
    std::vector<RiskSlot> slots;
    for (double a : cfg.levels) slots.push_back({level_label(a) + "VaR", a, true, EsConvention::Paper});
    for (EsConvention c : cfg.conventions)
        for (double a : cfg.levels) {
            std::string name = level_label(a) + "ES";
            if (cfg.conventions.size() > 1) name += "[" + to_string(c) + "]";
            slots.push_back({name, a, false, c});
        }
    return slots;
}

inline std::vector<double> risk_values(const std::vector<RiskSlot>& slots, double h, const InnovationDist& dist,
                                       QuantileScale scale) {
    std::vector<double> out;
    out.reserve(slots.size());
    for (const auto& s : slots)
        out.push_back(s.is_var ? var_forecast(h, s.level, dist, scale) : es_forecast(h, s.level, dist, s.convention, scale));
    return out;
}

inline std::size_t resolve_threads(std::size_t requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("RHYGARCH_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

inline Replication run_replication(const StudyConfig& cfg, const std::vector<std::string>& names,
                                   const std::vector<RiskSlot>& slots, std::size_t m) {
    Replication rep;
    rep.index = m;
    rep.seed = derive_seed(cfg.master_seed, m);

    SimulateOptions sim_opt;
    sim_opt.burn_in = cfg.burn_in;
    sim_opt.truncation = cfg.truncation;
    sim_opt.keep_latent = false;
    const SeriesPair path = simulate(cfg.model, cfg.T, rep.seed, sim_opt);
    rep.risk_truth = risk_values(slots, *path.next_h, cfg.model.innovation, cfg.scale);

    RhygarchParams est = cfg.model;
    if (cfg.fit_enabled) {
        FitOptions fo = cfg.fit_options;
        fo.truncation = cfg.truncation;
        fo.seed = derive_seed(rep.seed, 7);
        try {
            const FitResult fr = fit(path, cfg.fit_dist, std::nullopt, fo);
            est = fr.estimates;
            rep.converged = fr.converged;
            rep.grad_norm = fr.grad_norm;
        } catch (const std::exception&) {
            rep.converged = false;
        }
    } else {
        rep.converged = true;
    }
    for (const auto& n : names) rep.estimates.push_back(parameter_value(est, n));
    if (rep.converged) {
        const double h_next = forecast_h(est, path.realized, cfg.truncation);
        rep.risk_estimate = risk_values(slots, h_next, est.innovation, cfg.scale);
    }
    return rep;
}

inline McRow aggregate(const std::string& name, const std::vector<double>& truth, const std::vector<double>& estimate) {
    McRow row{name, 0.0, 0.0, 0.0};
    const double n = static_cast<double>(estimate.size());
    if (estimate.empty()) {
        row.true_value = row.mean = row.mse = std::numeric_limits<double>::quiet_NaN();
        return row;
    }
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        row.true_value += truth[i] / n;
        row.mean += estimate[i] / n;
        row.mse += (estimate[i] - truth[i]) * (estimate[i] - truth[i]) / n;
    }
    return row;
}

}  // namespace detail

inline McSummary run_study(const StudyConfig& cfg) {
    if (cfg.M < 1 || cfg.T < 1) throw DomainError("run_study: T and M must be >= 1");
    for (double a : cfg.levels) detail::require_probability(a);
    const StationarityReport report = check_stationarity(cfg.model, cfg.truncation);
    if (!report.first_moment_ok) throw NonStationaryError("run_study: true parameters fail the first-moment condition");

    const std::vector<std::string> names = table_parameter_names(cfg.fit_dist);
    const std::vector<detail::RiskSlot> slots = detail::risk_slots(cfg);

    std::vector<Replication> reps(cfg.M);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t m = next++; m < cfg.M; m = next++) reps[m] = detail::run_replication(cfg, names, slots, m);
    };
    const std::size_t n_threads = std::min(detail::resolve_threads(cfg.threads), cfg.M);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    }

    McSummary s;
    s.model_label = cfg.label;
    s.T = cfg.T;
    s.M = cfg.M;
    s.master_seed = cfg.master_seed;
    for (const auto& r : reps) s.converged += r.converged ? 1 : 0;
    s.convergence_rate = static_cast<double>(s.converged) / static_cast<double>(cfg.M);

    for (std::size_t k = 0; k < names.size(); ++k) {
        std::vector<double> truth, est;
        for (const auto& r : reps)
            if (r.converged) {
                truth.push_back(parameter_value(cfg.model, names[k]));
                est.push_back(r.estimates[k]);
            }
        s.rows.push_back(detail::aggregate(names[k], truth, est));
    }
    for (std::size_t k = 0; k < slots.size(); ++k) {
        std::vector<double> truth, est;
        for (const auto& r : reps)
            if (r.converged) {
                truth.push_back(r.risk_truth[k]);
                est.push_back(r.risk_estimate[k]);
            }
        s.risk_rows.push_back(detail::aggregate(slots[k].name, truth, est));
    }
    s.replications = std::move(reps);
    return s;
}

/// Study configuration document:
///   {model: params object, dist, T, M, K, levels, conventions, master_seed}
/// plus optional label, burn_in, quantile ("standardized" | "raw"), fit (bool), threads.
inline void from_json(const nlohmann::json& j, StudyConfig& c) {
    static const char* const known[] = {"model", "dist", "T", "M", "K", "levels", "conventions", "master_seed",
                                        "label", "burn_in", "quantile", "fit", "threads"};
    for (const auto& item : j.items())
        if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return item.key() == k; }) ==
            std::end(known))
            throw DataError("unknown study configuration field '" + item.key() + "'");

    c.model = j.at("model").get<RhygarchParams>();
    c.fit_dist = dist_kind_from_string(j.at("dist").get<std::string>());
    c.T = j.at("T").get<std::size_t>();
    c.M = j.at("M").get<std::size_t>();
    c.truncation = j.value("K", kDefaultTruncation);
    c.levels = j.value("levels", std::vector<double>{0.05, 0.01});
    c.conventions.clear();
    for (const auto& name : j.value("conventions", std::vector<std::string>{"paper"}))
        c.conventions.push_back(es_convention_from_string(name));
    c.master_seed = j.at("master_seed").get<std::uint64_t>();
    c.label = j.value("label", std::string(c.fit_dist == DistKind::Gaussian ? "RHYGARCH-GG" : "RHYGARCH-tG"));
    c.burn_in = j.value("burn_in", kDefaultBurnIn);
    c.scale = quantile_scale_from_string(j.value("quantile", std::string("standardized")));
    c.fit_enabled = j.value("fit", true);
    c.threads = j.value("threads", std::size_t{0});

    if (c.T < 1 || c.M < 1 || c.truncation < 1) throw DataError("study configuration: T, M and K must be >= 1");
    for (double a : c.levels)
        if (!(a > 0.0 && a < 1.0)) throw DataError("study configuration: levels must lie in (0,1)");
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

enum class TableFormat { Text, Csv, Json };

inline void to_json(nlohmann::json& j, const McRow& r) {
    j = nlohmann::json{{"name", r.name}, {"true", r.true_value}, {"mse", r.mse}, {"mean", r.mean}};
}

inline void to_json(nlohmann::json& j, const McSummary& s) {
    nlohmann::json reps = nlohmann::json::array();
    for (const auto& r : s.replications)
        reps.push_back({{"index", r.index},
                        {"seed", r.seed},
                        {"converged", r.converged},
                        {"grad_norm", r.grad_norm},
                        {"estimates", r.estimates},
                        {"risk_truth", r.risk_truth},
                        {"risk_estimate", r.risk_estimate}});
    j = nlohmann::json{
        {"model_label", s.model_label},
        {"T", s.T},
        {"M", s.M},
        {"rows", s.rows},
        {"risk_rows", s.risk_rows},
        {"convergence_rate", s.convergence_rate},
        {"converged", s.converged},
        {"master_seed", s.master_seed},
        {"replications", reps},
    };
}

/// Columns: parameter, true, MSE, mean. Text output prints 4 decimals.
inline std::string emit_table(const McSummary& s, TableFormat format) {
    if (format == TableFormat::Json) return nlohmann::json(s).dump(2) + "\n";

    std::ostringstream out;
    if (format == TableFormat::Csv) {
        out << "parameter,true,mse,mean\n";
        char buf[128];
        for (const auto* group : {&s.rows, &s.risk_rows})
            for (const auto& r : *group) {
                std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g\n", r.true_value, r.mse, r.mean);
                out << r.name << buf;
            }
        return out.str();
    }

    char buf[160];
    std::snprintf(buf, sizeof buf, "%s  T=%zu  M=%zu  converged=%zu (%.1f%%)  seed=%llu\n", s.model_label.c_str(), s.T,
                  s.M, s.converged, 100.0 * s.convergence_rate, static_cast<unsigned long long>(s.master_seed));
    out << buf;
    const std::string rule(46, '-');
    std::snprintf(buf, sizeof buf, "%-16s %9s %9s %9s\n", "parameter", "True", "MSE", "Mean");
    out << rule << "\n" << buf << rule << "\n";
    auto print = [&](const McRow& r) {
        std::snprintf(buf, sizeof buf, "%-16s %9.4f %9.4f %9.4f\n", r.name.c_str(), r.true_value, r.mse, r.mean);
        out << buf;
    };
    for (const auto& r : s.rows) print(r);
    if (!s.risk_rows.empty()) {
        out << rule << "\n";
        for (const auto& r : s.risk_rows) print(r);
    }
    out << rule << "\n";
    return out.str();
}

}  // namespace rhygarch
