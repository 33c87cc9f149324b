#pragma once

// Volatility filtering from observed realized measures and the two
// quasi-log-likelihoods (Gaussian-Gaussian and standardized-t-Gaussian).

#include "rhygarch/dist.hpp"
#include "rhygarch/errors.hpp"
#include "rhygarch/filter.hpp"
#include "rhygarch/model.hpp"
#include "rhygarch/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace rhygarch {

/// log h_t = omega + sum_{i=1..K} psi_i log x_{t-i} for t = 0..n_out-1, where
/// lags reaching before the sample use `presample`. n_out may exceed
/// log_x.size() by one to produce the one-step-ahead value.
inline std::vector<double> filter_log_h(const PsiWeights& psi, double omega, std::span<const double> log_x,
                                        double presample, std::size_t n_out) {
    const std::size_t K = psi.truncation;
    const std::vector<double>& w = psi.weights;

    // tail[t] = sum_{i=t+1..K} psi_i, the weight landing on presample values.
    std::vector<double> tail(K + 1, 0.0);
    for (std::size_t t = K; t-- > 0;) tail[t] = tail[t + 1] + w[t];

    std::vector<double> log_h(n_out);
    for (std::size_t t = 0; t < n_out; ++t) log_h[t] = omega + (t < K ? presample * tail[t] : 0.0);

    const std::size_t n_src = std::min(log_x.size(), n_out);
    for (std::size_t s = 0; s < n_src; ++s) {
        const double v = log_x[s];
        const std::size_t m = std::min(K, n_out - 1 - s);
        double* dst = log_h.data() + s + 1;
        for (std::size_t i = 0; i < m; ++i) dst[i] += w[i] * v;
    }
    return log_h;
}

namespace detail {

inline std::vector<double> checked_log(std::span<const double> x) {
    std::vector<double> out(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) {
        if (!(x[t] > 0.0) || !std::isfinite(x[t]))
            throw DataError("realized measure must be positive and finite at index " + std::to_string(t), t);
        out[t] = std::log(x[t]);
    }
    return out;
}

inline double mean(std::span<const double> v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace detail

/// log h_1..log h_T from realized measures; presample lags use the sample mean of log x.
inline std::vector<double> filter_volatility(const RhygarchParams& params, std::span<const double> x,
                                             std::size_t K = kDefaultTruncation) {
    const std::vector<double> lx = detail::checked_log(x);
    return filter_log_h(params.psi(K), params.omega, lx, detail::mean(lx), lx.size());
}

struct LikelihoodOptions {
    // Exclude the first K observations from the sums (their filter leans on presample values).
    bool drop_presample = false;
    // Clamp log h to [-kLogHClamp, kLogHClamp]; each clamped observation is counted.
    bool clamp = true;
};

inline constexpr double kLogHClamp = 30.0;

struct LikelihoodValue {
    double total = 0.0;
    double returns_part = 0.0;  // l(r | x)
    double measure_part = 0.0;  // l(x)
    std::vector<double> z_resid;
    std::vector<double> u_resid;
    std::vector<double> logh;
    std::size_t clamp_events = 0;
    // Low-order part of the sum: total + total_correction carries about twice
    // the precision of total alone.
    double total_correction = 0.0;
};

/// A(nu) = log Gamma(nu/2) - log Gamma((nu+1)/2).
inline double student_a(double nu) { return std::lgamma(0.5 * nu) - std::lgamma(0.5 * (nu + 1.0)); }

namespace detail {

// Neumaier's compensated summation.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;

    void add(double x) {
        const double t = sum + x;
        comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
    double residual() const { return comp - (value() - sum); }
};

inline double two_sum_error(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    return (a - (s - bb)) + (b - bb);
}

inline LikelihoodValue evaluate_loglik(const RhygarchParams& p, const SeriesPair& data, std::size_t K,
                                       const LikelihoodOptions& opt) {
    if (!(p.sigma_u > 0.0)) throw DomainError("loglik: sigma_u must be positive");
    if (data.returns.size() != data.realized.size())
        throw DataError("returns and realized have different lengths");
    if (data.returns.empty()) throw DataError("series is empty");

    const std::vector<double> lx = checked_log(data.realized);
    const std::size_t T = lx.size();

    LikelihoodValue out;
    out.logh = filter_log_h(p.psi(K), p.omega, lx, mean(lx), T);

    const std::size_t start = opt.drop_presample ? std::min(K, T) : 0;
    out.z_resid.reserve(T - start);
    out.u_resid.reserve(T - start);

    const bool student = p.innovation.is_student();
    const double nu = p.innovation.nu;
    const double log_2pi = std::log(2.0 * std::numbers::pi);
    const double t_const = student ? student_a(nu) + 0.5 * std::log(std::numbers::pi * (nu - 2.0)) : 0.0;
    const double log_var_u = 2.0 * std::log(p.sigma_u);
    const double inv_var_u = 1.0 / (p.sigma_u * p.sigma_u);

    CompensatedSum ret_sum;
    CompensatedSum meas_sum;
    for (std::size_t t = 0; t < T; ++t) {
        double lh = out.logh[t];
        if (opt.clamp && (lh > kLogHClamp || lh < -kLogHClamp)) {
            lh = std::clamp(lh, -kLogHClamp, kLogHClamp);
            out.logh[t] = lh;
            ++out.clamp_events;
        }
        if (t < start) continue;
        const double h = std::exp(lh);
        const double r = data.returns[t];
        const double z = r / std::sqrt(h);
        const double u = lx[t] - p.xi - p.phi * lh - p.tau1 * z - p.tau2 * (z * z - 1.0);
        out.z_resid.push_back(z);
        out.u_resid.push_back(u);

        if (student)
            ret_sum.add(-(t_const + 0.5 * lh + 0.5 * (nu + 1.0) * std::log1p(r * r / (h * (nu - 2.0)))));
        else
            ret_sum.add(-0.5 * (log_2pi + lh + r * r / h));
        meas_sum.add(-0.5 * (log_2pi + log_var_u + u * u * inv_var_u));
    }
    out.returns_part = ret_sum.value();
    out.measure_part = meas_sum.value();
    out.total = out.returns_part + out.measure_part;
    out.total_correction =
        two_sum_error(out.returns_part, out.measure_part) + ret_sum.residual() + meas_sum.residual();
    return out;
}

}  // namespace detail

/// Gaussian-Gaussian quasi-log-likelihood. Requires Gaussian innovations.
inline LikelihoodValue loglik_gg(const RhygarchParams& p, const SeriesPair& data, std::size_t K = kDefaultTruncation,
                                 const LikelihoodOptions& opt = {}) {
    if (p.innovation.is_student()) throw DomainError("loglik_gg: parameters carry Student-t innovations");
    return detail::evaluate_loglik(p, data, K, opt);
}

/// Standardized-t-Gaussian quasi-log-likelihood. Requires Student-t innovations with nu > 2.
inline LikelihoodValue loglik_tg(const RhygarchParams& p, const SeriesPair& data, std::size_t K = kDefaultTruncation,
                                 const LikelihoodOptions& opt = {}) {
    if (!p.innovation.is_student()) throw DomainError("loglik_tg: parameters carry Gaussian innovations");
    if (!(p.innovation.nu > 2.0)) throw DomainError("loglik_tg: nu must exceed 2");
    return detail::evaluate_loglik(p, data, K, opt);
}

/// Dispatch on the innovation kind carried by the parameters.
inline LikelihoodValue loglik(const RhygarchParams& p, const SeriesPair& data, std::size_t K = kDefaultTruncation,
                              const LikelihoodOptions& opt = {}) {
    return p.innovation.is_student() ? loglik_tg(p, data, K, opt) : loglik_gg(p, data, K, opt);
}

}  // namespace rhygarch
