#pragma once

// Parameter container for the realized HYGARCH(1,d,1) model
//
//   r_t      = sqrt(h_t) z_t
//   log h_t  = omega + psi(L) log x_t
//   log x_t  = xi + phi log h_t + tau1 z_t + tau2 (z_t^2 - 1) + u_t,   u_t ~ N(0, sigma_u^2)
//
// together with stationarity diagnostics and the implied unconditional means.

#include "rhygarch/dist.hpp"
#include "rhygarch/errors.hpp"
#include "rhygarch/filter.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace rhygarch {

inline constexpr std::size_t kDefaultTruncation = 1000;

struct RhygarchParams {
    double omega = 0.0;
    double gamma = 0.0;
    double beta = 0.0;
    double delta = 0.0;
    double d = 0.0;
    double xi = 0.0;
    double phi = 1.0;
    double tau1 = 0.0;
    double tau2 = 0.0;
    double sigma_u = 1.0;
    InnovationDist innovation = InnovationDist::gaussian();

    PsiWeights psi(std::size_t K) const { return psi_weights(delta, d, gamma, beta, K); }

    friend bool operator==(const RhygarchParams&, const RhygarchParams&) = default;
};

/// Model 1 of the simulation study (Gaussian z).
inline RhygarchParams model1_params() {
    RhygarchParams p;
    p.omega = 0.1;
    p.gamma = 0.1;
    p.beta = 0.4;
    p.delta = 0.4;
    p.d = 0.4;
    p.xi = -0.1;
    p.phi = 1.0;
    p.tau1 = -0.08;
    p.tau2 = 0.06;
    p.sigma_u = 0.4;
    p.innovation = InnovationDist::gaussian();
    return p;
}

/// Model 2: Model 1 with standardized t(3) innovations.
inline RhygarchParams model2_params() {
    RhygarchParams p = model1_params();
    p.innovation = InnovationDist::student_t(3.0);
    return p;
}

/// One message per violated invariant; empty when the parameters are admissible.
inline std::vector<std::string> validate(const RhygarchParams& p) {
    std::vector<std::string> out;
    const std::pair<const char*, double> fields[] = {
        {"omega", p.omega}, {"gamma", p.gamma}, {"beta", p.beta},   {"delta", p.delta},
        {"d", p.d},         {"xi", p.xi},       {"phi", p.phi},     {"tau1", p.tau1},
        {"tau2", p.tau2},   {"sigma_u", p.sigma_u},
    };
    for (const auto& [name, value] : fields)
        if (!std::isfinite(value)) out.push_back(std::string(name) + " must be finite");

    if (!(p.delta >= 0.0 && p.delta <= 1.0)) out.emplace_back("delta out of [0,1]");
    if (!(p.d >= 0.0)) out.emplace_back("d must be non-negative");
    if (!(std::abs(p.beta) < 1.0)) out.emplace_back("|beta| must be < 1");
    if (!(p.sigma_u > 0.0)) out.emplace_back("sigma_u must be positive");
    if (p.innovation.is_student() && !(p.innovation.nu > 2.0)) out.emplace_back("nu must exceed 2");
    return out;
}

struct StationarityReport {
    std::size_t truncation = 0;
    double sum_psi = 0.0;
    double phi_sum_psi = 0.0;
    double abs_sum_psi = 0.0;
    double tail_estimate = 0.0;
    double psi_min = 0.0;
    bool first_moment_ok = false;
    bool second_moment_ok = false;
    bool strictly_stationary = false;  // first-moment condition plus |phi psi(1)| < 1
    bool weakly_stationary = false;    // strictly stationary and second-moment condition
};

/// Tolerance applied to the "psi_i >= 0 for all i" requirement on truncated weights.
inline constexpr double kPsiNonNegTolerance = 1e-12;

inline StationarityReport check_stationarity(const RhygarchParams& p, std::size_t K = kDefaultTruncation) {
    const PsiWeights psi = p.psi(K);
    StationarityReport r;
    r.truncation = K;
    r.sum_psi = psi.partial_sum;
    r.phi_sum_psi = p.phi * psi.partial_sum;
    r.abs_sum_psi = psi.abs_sum();
    r.tail_estimate = psi.tail_estimate;
    r.psi_min = *std::min_element(psi.weights.begin(), psi.weights.end());

    const bool summable = std::isfinite(r.abs_sum_psi + r.tail_estimate);
    r.first_moment_ok = r.phi_sum_psi < 1.0 && summable;
    r.strictly_stationary = r.first_moment_ok && std::abs(r.phi_sum_psi) < 1.0;

    // E z^3 and E z^4 are finite for the Gaussian and for t with nu > 4.
    const bool z_moments = !p.innovation.is_student() || p.innovation.nu > 4.0;
    r.second_moment_ok = r.strictly_stationary && p.omega == 0.0 && p.phi > 0.0 &&
                         r.psi_min >= -kPsiNonNegTolerance && z_moments;
    r.weakly_stationary = r.strictly_stationary && r.second_moment_ok;
    return r;
}

struct ImpliedMeans {
    double mean_log_h = 0.0;
    double mean_log_x = 0.0;
};

/// Unconditional means of (log h_t, log x_t), with psi(1) replaced by the K-term partial sum.
inline ImpliedMeans implied_means(const RhygarchParams& p, std::size_t K = kDefaultTruncation) {
    const double s = p.psi(K).partial_sum;
    const double denom = 1.0 - p.phi * s;
    if (!(denom > 0.0))
        throw NonStationaryError("implied_means: phi * psi(1) = " + std::to_string(p.phi * s) + " >= 1");
    return {(p.omega + p.xi * s) / denom, (p.xi + p.phi * p.omega) / denom};
}

namespace detail {

inline double volterra_term(std::span<const double> psi, double phi_omega, std::span<const double> v_history,
                            std::size_t depth, double weight, std::size_t lag) {
    if (depth == 0) {
        const double v = lag >= 1 && lag <= v_history.size() ? v_history[lag - 1] : 0.0;
        return weight * (phi_omega + v);
    }
    double acc = 0.0;
    for (std::size_t i = 1; i <= psi.size(); ++i)
        acc += volterra_term(psi, phi_omega, v_history, depth - 1, weight * psi[i - 1], lag + i);
    return acc;
}

}  // namespace detail

/// Truncated Volterra expansion of log h_t:  sum_{l=0..L_max} H_l(t), with
///   H_0 = omega,
///   H_l = phi^{l-1} sum_{i_1..i_l} psi_{i_1}..psi_{i_l} (omega phi + v_{t - i_1 - .. - i_l}),
/// where v_t = log x_t - phi log h_t. v_history[j - 1] holds v_{t-j}; missing lags count as 0.
/// Cost is K^L_max, so this is meant for small K and L_max only.
inline double volterra_oracle(const RhygarchParams& p, std::span<const double> v_history, std::size_t L_max,
                              std::size_t K) {
    const PsiWeights psi = p.psi(K);
    double total = p.omega;
    double phi_power = 1.0;
    for (std::size_t l = 1; l <= L_max; ++l) {
        total += phi_power * detail::volterra_term(psi.weights, p.omega * p.phi, v_history, l, 1.0, 0);
        phi_power *= p.phi;
    }
    return total;
}

// ---------------------------------------------------------------------------
// JSON: flat object with the field names of RhygarchParams plus
// "innovation" ("gaussian" | "student_t") and "nu".
// ---------------------------------------------------------------------------

inline void to_json(nlohmann::json& j, const RhygarchParams& p) {
    j = nlohmann::json{
        {"omega", p.omega}, {"gamma", p.gamma}, {"beta", p.beta}, {"delta", p.delta},     {"d", p.d},
        {"xi", p.xi},       {"phi", p.phi},     {"tau1", p.tau1}, {"tau2", p.tau2},       {"sigma_u", p.sigma_u},
        {"innovation", to_string(p.innovation.kind)},
    };
    if (p.innovation.is_student()) j["nu"] = p.innovation.nu;
}

inline void from_json(const nlohmann::json& j, RhygarchParams& p) {
    static const char* const known[] = {"omega", "gamma", "beta", "delta", "d",       "xi",         "phi",
                                        "tau1",  "tau2",  "sigma_u", "innovation", "nu"};
    for (const auto& item : j.items()) {
        if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return item.key() == k; }) ==
            std::end(known))
            throw DataError("unknown parameter field '" + item.key() + "'");
    }
    auto number = [&j](const char* key) {
        const auto it = j.find(key);
        if (it == j.end()) throw DataError(std::string("missing parameter field '") + key + "'");
        if (!it->is_number()) throw DataError(std::string("parameter field '") + key + "' must be a number");
        return it->get<double>();
    };
    p.omega = number("omega");
    p.gamma = number("gamma");
    p.beta = number("beta");
    p.delta = number("delta");
    p.d = number("d");
    p.xi = number("xi");
    p.phi = number("phi");
    p.tau1 = number("tau1");
    p.tau2 = number("tau2");
    p.sigma_u = number("sigma_u");
    const std::string kind = j.value("innovation", std::string("gaussian"));
    p.innovation.kind = dist_kind_from_string(kind);
    p.innovation.nu = p.innovation.is_student() ? number("nu") : 0.0;
}

inline void to_json(nlohmann::json& j, const StationarityReport& r) {
    j = nlohmann::json{
        {"truncation", r.truncation},
        {"sum_psi", r.sum_psi},
        {"phi_sum_psi", r.phi_sum_psi},
        {"abs_sum_psi", r.abs_sum_psi},
        {"tail_estimate", r.tail_estimate},
        {"psi_min", r.psi_min},
        {"first_moment_ok", r.first_moment_ok},
        {"second_moment_ok", r.second_moment_ok},
        {"strictly_stationary", r.strictly_stationary},
        {"weakly_stationary", r.weakly_stationary},
    };
}

}  // namespace rhygarch
