#pragma once

// One-step-ahead variance, VaR and ES forecasts.
//
// Two ES conventions are supported:
//   paper     ES = sqrt(h) f(q) / (1 - alpha)                       (Gaussian)
//             ES = sqrt(h) f(q) / (1 - alpha) (nu + q^2) / (nu - 1)   (Student-t)
//             positive values, reproducing the published simulation tables;
//   standard  ES = E[r | r <= VaR], the lower-tail conditional mean (negative).

#include "rhygarch/dist.hpp"
#include "rhygarch/errors.hpp"
#include "rhygarch/loglik.hpp"
#include "rhygarch/model.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "json.hpp"

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace rhygarch {

enum class EsConvention { Paper, Standard };

/// Which Student-t quantile scales VaR/ES: the unit-variance one, or the raw t(nu).
enum class QuantileScale { Standardized, Raw };

inline std::string to_string(EsConvention c) { return c == EsConvention::Paper ? "paper" : "standard"; }
inline std::string to_string(QuantileScale q) { return q == QuantileScale::Standardized ? "standardized" : "raw"; }

inline EsConvention es_convention_from_string(const std::string& s) {
    if (s == "paper") return EsConvention::Paper;
    if (s == "standard") return EsConvention::Standard;
    throw DomainError("unknown ES convention '" + s + "' (expected paper or standard)");
}

inline QuantileScale quantile_scale_from_string(const std::string& s) {
    if (s == "standardized") return QuantileScale::Standardized;
    if (s == "raw" || s == "raw-quantile") return QuantileScale::Raw;
    throw DomainError("unknown quantile scale '" + s + "' (expected standardized or raw)");
}

/// h_{T+1} from the realized history, with the same presample plug-in as the likelihood.
inline double forecast_h(const RhygarchParams& params, std::span<const double> x_history,
                         std::size_t K = kDefaultTruncation) {
    if (x_history.empty()) throw DataError("forecast_h: empty realized history");
    const std::vector<double> lx = detail::checked_log(x_history);
    const std::vector<double> log_h = filter_log_h(params.psi(K), params.omega, lx, detail::mean(lx), lx.size() + 1);
    return std::exp(log_h.back());
}

namespace detail {

inline void require_forecast_args(double h, double alpha, const InnovationDist& dist) {
    if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("forecast variance h must be positive and finite");
    require_probability(alpha);
    if (dist.is_student()) require_nu(dist.nu);
}

struct TailPoint {
    double q;        // quantile at alpha
    double density;  // density at q
};

inline TailPoint tail_point(double alpha, const InnovationDist& dist, QuantileScale scale) {
    if (!dist.is_student()) {
        const double q = norm_quantile(alpha);
        return {q, norm_pdf(q)};
    }
    if (scale == QuantileScale::Raw) {
        const double q = t_quantile(alpha, dist.nu);
        return {q, t_pdf(q, dist.nu)};
    }
    const double q = std_t_quantile(alpha, dist.nu);
    return {q, std_t_pdf(q, dist.nu)};
}

}  // namespace detail

inline double var_forecast(double h, double alpha, const InnovationDist& dist,
                           QuantileScale scale = QuantileScale::Standardized) {
    detail::require_forecast_args(h, alpha, dist);
    return std::sqrt(h) * detail::tail_point(alpha, dist, scale).q;
}

inline double es_forecast(double h, double alpha, const InnovationDist& dist, EsConvention convention,
                          QuantileScale scale = QuantileScale::Standardized) {
    detail::require_forecast_args(h, alpha, dist);
    const auto [q, f] = detail::tail_point(alpha, dist, scale);
    const double sd = std::sqrt(h);
    if (!dist.is_student()) return convention == EsConvention::Paper ? sd * f / (1.0 - alpha) : -sd * f / alpha;

    const double nu = dist.nu;
    if (convention == EsConvention::Paper) return sd * f / (1.0 - alpha) * (nu + q * q) / (nu - 1.0);
    // Lower-tail mean of t(nu) is -f(q)(nu + q^2)/((nu-1) alpha). For the
    // standardized variable (scale s = sqrt((nu-2)/nu)) this becomes
    // -f*(q*)(nu - 2 + q*^2)/((nu-1) alpha).
    const double shift = scale == QuantileScale::Raw ? nu : nu - 2.0;
    return -sd * f * (shift + q * q) / ((nu - 1.0) * alpha);
}

/// Lower-tail mean sqrt(h) E[Z | Z <= q_alpha] by adaptive Gauss-Kronrod quadrature of x f(x).
inline double es_quadrature_oracle(double h, double alpha, const InnovationDist& dist,
                                   QuantileScale scale = QuantileScale::Standardized) {
    detail::require_forecast_args(h, alpha, dist);
    const double q = detail::tail_point(alpha, dist, scale).q;
    auto density = [&](double x) {
        if (!dist.is_student()) return norm_pdf(x);
        return scale == QuantileScale::Raw ? t_pdf(x, dist.nu) : std_t_pdf(x, dist.nu);
    };
    auto integrand = [&](double x) { return x * density(x); };
    double error = 0.0;
    const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, -std::numeric_limits<double>::infinity(), q, 30, 1e-12, &error);
    return std::sqrt(h) * integral / alpha;
}

struct RiskForecast {
    double h_next = 0.0;
    double level = 0.0;
    double var_value = 0.0;
    double es_value = 0.0;
    EsConvention convention = EsConvention::Paper;
    QuantileScale scale = QuantileScale::Standardized;
    InnovationDist dist;
};

inline RiskForecast make_forecast(double h_next, double alpha, const InnovationDist& dist, EsConvention convention,
                                  QuantileScale scale = QuantileScale::Standardized) {
    return {h_next, alpha, var_forecast(h_next, alpha, dist, scale), es_forecast(h_next, alpha, dist, convention, scale),
            convention, scale, dist};
}

inline void to_json(nlohmann::json& j, const RiskForecast& f) {
    j = nlohmann::json{
        {"h_next", f.h_next},
        {"alpha", f.level},
        {"var", f.var_value},
        {"es", f.es_value},
        {"convention", to_string(f.convention)},
        {"dist", to_string(f.dist.kind)},
    };
    if (f.dist.is_student()) {
        j["nu"] = f.dist.nu;
        j["quantile"] = to_string(f.scale);
    }
}

}  // namespace rhygarch
