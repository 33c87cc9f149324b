#pragma once

// Lag-polynomial machinery for the hyperbolic filter
//
//   psi(L) = delta * [1 - (1 - gamma L) (1 - beta L)^{-1} (1 - L)^d]
//
// All polynomials are dense coefficient vectors indexed by lag power and
// truncated at a fixed maximum lag K.

#include "rhygarch/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace rhygarch {

using Coeffs = std::vector<double>;

/// Coefficients c_0..c_K of (1 - L)^d, via c_k = c_{k-1} (k - 1 - d) / k.
inline Coeffs fracdiff_coeffs(double d, std::size_t K) {
    if (!(d >= 0.0)) throw DomainError("fracdiff_coeffs: d must be >= 0");
    Coeffs c(K + 1);
    c[0] = 1.0;
    for (std::size_t k = 1; k <= K; ++k) c[k] = c[k - 1] * (static_cast<double>(k) - 1.0 - d) / static_cast<double>(k);
    return c;
}

/// Cauchy product of a and b, truncated at lag K (result has K + 1 entries).
inline Coeffs poly_mul(std::span<const double> a, std::span<const double> b, std::size_t K) {
    Coeffs out(K + 1, 0.0);
    const std::size_t na = std::min(a.size(), K + 1);
    for (std::size_t i = 0; i < na; ++i) {
        if (a[i] == 0.0) continue;
        const std::size_t nb = std::min(b.size(), K + 1 - i);
        for (std::size_t j = 0; j < nb; ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

/// a(L) / (1 - beta L) truncated at lag K: q_k = a_k + beta q_{k-1}.
inline Coeffs poly_div_geometric(std::span<const double> a, double beta, std::size_t K) {
    if (!(std::abs(beta) < 1.0)) throw DomainError("poly_div_geometric: |beta| must be < 1");
    Coeffs q(K + 1, 0.0);
    double prev = 0.0;
    for (std::size_t k = 0; k <= K; ++k) {
        const double ak = k < a.size() ? a[k] : 0.0;
        q[k] = ak + beta * prev;
        prev = q[k];
    }
    return q;
}

/// Truncated psi-weight expansion. weights[i - 1] holds psi_i, i = 1..K.
struct PsiWeights {
    std::vector<double> weights;
    std::size_t truncation = 0;
    double partial_sum = 0.0;    // sum of the K weights
    double tail_estimate = 0.0;  // estimate of sum_{i>K} |psi_i|

    double operator[](std::size_t lag) const { return weights[lag - 1]; }

    double abs_sum() const {
        return std::accumulate(weights.begin(), weights.end(), 0.0,
                               [](double acc, double w) { return acc + std::abs(w); });
    }
};

namespace detail {

inline bool is_integer(double d) { return d == std::floor(d); }

// Estimate of sum_{i>K} |psi_i|. Non-integer d: psi_k ~ C k^{-1-d} with
// C = delta |1 - gamma| / (|1 - beta| |Gamma(-d)|), and the sum of k^{-1-d}
// over k > K uses an Euler-Maclaurin expansion. Integer d: the fractional
// factor is a finite polynomial and the tail is geometric in beta.
inline double psi_tail_estimate(double last, std::size_t K, double delta, double d, double gamma, double beta) {
    if (is_integer(d)) {
        const double b = std::abs(beta);
        return std::abs(last) * b / (1.0 - b);
    }
    const double k = static_cast<double>(K);
    const double C = delta * std::abs(1.0 - gamma) / (std::abs(1.0 - beta) * std::abs(boost::math::tgamma(-d)));
    const double zeta_tail = std::pow(k, -d) / d - 0.5 * std::pow(k, -1.0 - d) + (1.0 + d) / 12.0 * std::pow(k, -2.0 - d);
    return C * zeta_tail;
}

}  // namespace detail

/// psi_1..psi_K of delta [1 - (1 - gamma L)(1 - beta L)^{-1}(1 - L)^d].
inline PsiWeights psi_weights(double delta, double d, double gamma, double beta, std::size_t K) {
    if (!(delta >= 0.0 && delta <= 1.0)) throw DomainError("psi_weights: delta must lie in [0,1]");
    if (!(d >= 0.0)) throw DomainError("psi_weights: d must be >= 0");
    if (!(std::abs(beta) < 1.0)) throw DomainError("psi_weights: |beta| must be < 1");
    if (K < 1) throw DomainError("psi_weights: truncation K must be >= 1");
    if (!std::isfinite(gamma)) throw DomainError("psi_weights: gamma must be finite");

    const Coeffs frac = fracdiff_coeffs(d, K);
    const double numerator[2] = {1.0, -gamma};
    const Coeffs a = poly_div_geometric(poly_mul(numerator, frac, K), beta, K);

    PsiWeights psi;
    psi.truncation = K;
    psi.weights.resize(K);
    for (std::size_t k = 1; k <= K; ++k) psi.weights[k - 1] = -delta * a[k] + 0.0;
    psi.partial_sum = std::accumulate(psi.weights.begin(), psi.weights.end(), 0.0);
    psi.tail_estimate = detail::psi_tail_estimate(psi.weights.back(), K, delta, d, gamma, beta);
    return psi;
}

}  // namespace rhygarch
