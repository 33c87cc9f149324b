#pragma once

// Quasi-maximum-likelihood estimation over an unconstrained reparametrization:
//
//   omega, gamma, xi, phi, tau1, tau2   identity
//   delta, d                            logistic, (0,1)
//   beta                                tanh, (-1,1)
//   sigma_u                             exp, (0,inf)
//   nu                                  2 + exp, (2,inf)   [Student-t only]

#include "rhygarch/dist.hpp"
#include "rhygarch/errors.hpp"
#include "rhygarch/loglik.hpp"
#include "rhygarch/model.hpp"
#include "rhygarch/optim.hpp"
#include "rhygarch/series.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace rhygarch {

/// Parameter names in unconstrained-vector order; "nu" is present only for Student-t fits.
inline std::vector<std::string> parameter_names(DistKind kind) {
    std::vector<std::string> names = {"omega", "gamma", "beta", "delta", "d", "xi", "phi", "tau1", "tau2", "sigma_u"};
    if (kind == DistKind::StudentT) names.emplace_back("nu");
    return names;
}

namespace detail {

// Values this close to a bound are moved inside before the inverse map, so a
// boundary value maps to roughly +/-27.6 instead of infinity.
inline constexpr double kBoundaryEps = 1e-12;

inline double logit(double p) {
    p = std::clamp(p, kBoundaryEps, 1.0 - kBoundaryEps);
    return std::log(p / (1.0 - p));
}
inline double logistic(double y) { return 1.0 / (1.0 + std::exp(-y)); }
inline double safe_log(double v) { return std::log(std::max(v, std::numeric_limits<double>::min())); }

}  // namespace detail

inline std::vector<double> to_unconstrained(const RhygarchParams& p) {
    std::vector<double> y = {
        p.omega,
        p.gamma,
        std::atanh(std::clamp(p.beta, -1.0 + detail::kBoundaryEps, 1.0 - detail::kBoundaryEps)),
        detail::logit(p.delta),
        detail::logit(p.d),
        p.xi,
        p.phi,
        p.tau1,
        p.tau2,
        detail::safe_log(p.sigma_u),
    };
    if (p.innovation.is_student()) y.push_back(detail::safe_log(p.innovation.nu - 2.0));
    return y;
}

inline RhygarchParams from_unconstrained(const std::vector<double>& y, DistKind kind) {
    const std::size_t expected = kind == DistKind::StudentT ? 11 : 10;
    if (y.size() != expected) throw DomainError("from_unconstrained: expected " + std::to_string(expected) + " coordinates");
    RhygarchParams p;
    p.omega = y[0];
    p.gamma = y[1];
    p.beta = std::tanh(y[2]);
    p.delta = detail::logistic(y[3]);
    p.d = detail::logistic(y[4]);
    p.xi = y[5];
    p.phi = y[6];
    p.tau1 = y[7];
    p.tau2 = y[8];
    p.sigma_u = std::exp(y[9]);
    p.innovation = kind == DistKind::StudentT ? InnovationDist::student_t(2.0 + std::exp(y[10])) : InnovationDist::gaussian();
    return p;
}

struct FitOptions {
    std::size_t truncation = kDefaultTruncation;
    LikelihoodOptions likelihood{};
    optim::NelderMeadOptions simplex{.max_evaluations = 4000, .f_tol = 1e-10, .x_tol = 1e-6, .initial_step = 0.1};
    optim::BfgsOptions polish{.max_iterations = 300, .grad_tol = 1e-4};
    std::size_t extra_starts = 3;  // jittered restarts when the first run does not converge
    double jitter_sd = 0.25;       // in unconstrained coordinates
    std::uint64_t seed = 0;        // jitter stream
};

struct FitResult {
    RhygarchParams estimates;
    LikelihoodValue loglik;
    bool converged = false;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    double grad_norm = std::numeric_limits<double>::infinity();
    std::vector<double> gradient;  // d(loglik)/d(unconstrained), at the optimum
    RhygarchParams start;
    std::size_t clamp_events = 0;
    std::size_t starts_used = 0;
    std::uint64_t seed = 0;
};

/// Interior starting point derived from the data.
inline RhygarchParams default_start(const SeriesPair& data, DistKind kind, std::size_t K = kDefaultTruncation) {
    check_series(data);
    RhygarchParams p;
    p.omega = 0.05;
    p.gamma = 0.05;
    p.beta = 0.5;
    p.delta = 0.5;
    p.d = 0.3;
    p.phi = 1.0;
    p.tau1 = -0.05;
    p.tau2 = 0.05;
    p.sigma_u = 1.0;
    p.innovation = kind == DistKind::StudentT ? InnovationDist::student_t(8.0) : InnovationDist::gaussian();

    double mean_log_x = 0.0, mean_r2 = 0.0;
    for (std::size_t t = 0; t < data.size(); ++t) {
        mean_log_x += std::log(data.realized[t]);
        mean_r2 += data.returns[t] * data.returns[t];
    }
    mean_log_x /= static_cast<double>(data.size());
    mean_r2 /= static_cast<double>(data.size());
    p.xi = mean_r2 > 0.0 ? mean_log_x - std::log(mean_r2) : 0.0;

    // sigma_u: spread of the measurement residual at this point.
    const LikelihoodValue lv = detail::evaluate_loglik(p, data, K, {});
    if (lv.u_resid.size() > 1) {
        const double m = std::accumulate(lv.u_resid.begin(), lv.u_resid.end(), 0.0) / static_cast<double>(lv.u_resid.size());
        double ss = 0.0;
        for (double u : lv.u_resid) ss += (u - m) * (u - m);
        const double sd = std::sqrt(ss / static_cast<double>(lv.u_resid.size() - 1));
        if (std::isfinite(sd) && sd > 0.0) p.sigma_u = sd;
    }
    return p;
}

/// Negative log-likelihood over unconstrained coordinates, minus `offset`;
/// +inf where undefined. The offset is removed before the final rounding, so
/// values near the offset keep their small differences.
inline optim::Objective negative_loglik_objective(const SeriesPair& data, DistKind kind, const FitOptions& opt,
                                                  double offset = 0.0) {
    return [&data, kind, opt, offset](const std::vector<double>& y) {
        try {
            const LikelihoodValue v =
                detail::evaluate_loglik(from_unconstrained(y, kind), data, opt.truncation, opt.likelihood);
            const double f = (-v.total - offset) - v.total_correction;
            return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
        } catch (const std::exception&) {
            return std::numeric_limits<double>::infinity();
        }
    };
}

namespace detail {

struct FitAttempt {
    std::vector<double> x;
    double fx = std::numeric_limits<double>::infinity();
    double grad_norm = std::numeric_limits<double>::infinity();
    std::vector<double> gradient;
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool converged = false;
};

// Simplex search on the plain objective, then the quasi-Newton polish on the
// objective shifted by the simplex optimum.
inline FitAttempt run_attempt(const SeriesPair& data, DistKind kind, const FitOptions& opt,
                              const std::vector<double>& y0) {
    const optim::MinimizeResult nm = optim::nelder_mead(negative_loglik_objective(data, kind, opt), y0, opt.simplex);
    FitAttempt a;
    a.iterations = nm.iterations;
    a.evaluations = nm.evaluations;
    a.x = nm.x;
    a.fx = nm.fx;
    if (!std::isfinite(nm.fx)) return a;

    const optim::Objective shifted = negative_loglik_objective(data, kind, opt, nm.fx);
    const optim::BfgsResult qn = optim::bfgs(shifted, nm.x, opt.polish);
    a.iterations += qn.iterations;
    a.evaluations += qn.evaluations;
    if (qn.fx <= shifted(nm.x)) {
        a.x = qn.x;
        a.fx = nm.fx + qn.fx;
        a.gradient = qn.gradient;
        a.grad_norm = qn.grad_norm;
    } else {
        a.gradient = optim::numeric_gradient(shifted, nm.x, opt.polish.rel_step, opt.polish.min_step).value;
        a.grad_norm = optim::norm2(a.gradient);
    }
    a.converged = std::isfinite(a.fx) && a.grad_norm <= opt.polish.grad_tol;
    return a;
}

}  // namespace detail

/// Maximize the likelihood matching `kind` (Gaussian -> GG, StudentT -> tG).
inline FitResult fit(const SeriesPair& data, DistKind kind, const std::optional<RhygarchParams>& start = std::nullopt,
                     const FitOptions& opt = {}) {
    check_series(data);
    const optim::Objective objective = negative_loglik_objective(data, kind, opt);

    RhygarchParams start_params = start ? *start : default_start(data, kind, opt.truncation);
    start_params.innovation.kind = kind;
    if (kind == DistKind::StudentT && !(start_params.innovation.nu > 2.0)) start_params.innovation.nu = 8.0;
    if (kind == DistKind::Gaussian) start_params.innovation.nu = 0.0;

    std::vector<double> y0 = to_unconstrained(start_params);
    if (!std::isfinite(objective(y0))) {
        start_params = default_start(data, kind, opt.truncation);
        y0 = to_unconstrained(start_params);
        if (!std::isfinite(objective(y0))) throw DataError("fit: log-likelihood is not finite at the starting point");
    }

    FitResult result;
    result.start = start_params;
    result.seed = opt.seed;

    detail::FitAttempt best = detail::run_attempt(data, kind, opt, y0);
    std::size_t iterations = best.iterations, evaluations = best.evaluations, starts = 1;
    if (!best.converged) {
        Rng jitter = make_stream(opt.seed, 0x6A177E5ULL);
        std::normal_distribution<double> normal(0.0, opt.jitter_sd);
        for (std::size_t s = 0; s < opt.extra_starts && !best.converged; ++s) {
            std::vector<double> y = best.x;
            for (double& v : y) v += normal(jitter);
            detail::FitAttempt a = detail::run_attempt(data, kind, opt, y);
            iterations += a.iterations;
            evaluations += a.evaluations;
            ++starts;
            if (a.converged || a.fx < best.fx) best = std::move(a);
        }
    }

    result.estimates = from_unconstrained(best.x, kind);
    result.loglik = detail::evaluate_loglik(result.estimates, data, opt.truncation, opt.likelihood);
    result.clamp_events = result.loglik.clamp_events;
    result.converged = best.converged && validate(result.estimates).empty();
    result.iterations = iterations;
    result.evaluations = evaluations;
    result.grad_norm = best.grad_norm;
    result.gradient.resize(best.gradient.size());
    std::transform(best.gradient.begin(), best.gradient.end(), result.gradient.begin(), [](double g) { return -g; });
    result.starts_used = starts;
    return result;
}

inline void to_json(nlohmann::json& j, const FitResult& r) {
    nlohmann::json gradient = nlohmann::json::object();
    const auto names = parameter_names(r.estimates.innovation.kind);
    for (std::size_t i = 0; i < names.size() && i < r.gradient.size(); ++i) gradient[names[i]] = r.gradient[i];
    j = nlohmann::json{
        {"estimates", r.estimates},
        {"loglik", {{"total", r.loglik.total}, {"returns_part", r.loglik.returns_part}, {"measure_part", r.loglik.measure_part}}},
        {"converged", r.converged},
        {"iterations", r.iterations},
        {"evaluations", r.evaluations},
        {"grad_norm", r.grad_norm},
        {"gradient", gradient},
        {"start", r.start},
        {"clamp_events", r.clamp_events},
        {"starts_used", r.starts_used},
        {"seed", r.seed},
    };
}

}  // namespace rhygarch
