#pragma once

// Probability primitives: standard normal and variance-standardized Student-t
// densities, CDFs, quantiles and samplers, plus seed derivation for
// independent random streams.

#include "rhygarch/errors.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace rhygarch {

enum class DistKind { Gaussian, StudentT };

/// Innovation law for z_t. For StudentT the draws are rescaled to unit variance.
struct InnovationDist {
    DistKind kind = DistKind::Gaussian;
    double nu = 0.0;  // degrees of freedom, meaningful only for StudentT

    static InnovationDist gaussian() { return {DistKind::Gaussian, 0.0}; }
    static InnovationDist student_t(double nu) { return {DistKind::StudentT, nu}; }

    bool is_student() const noexcept { return kind == DistKind::StudentT; }
    bool valid() const noexcept { return kind == DistKind::Gaussian || nu > 2.0; }

    friend bool operator==(const InnovationDist&, const InnovationDist&) = default;
};

inline std::string to_string(DistKind kind) {
    return kind == DistKind::Gaussian ? "gaussian" : "student_t";
}

inline DistKind dist_kind_from_string(const std::string& name) {
    if (name == "gaussian" || name == "normal" || name == "GG") return DistKind::Gaussian;
    if (name == "student_t" || name == "t" || name == "tG") return DistKind::StudentT;
    throw DomainError("unknown distribution '" + name + "' (expected gaussian or student_t)");
}

namespace detail {

inline void require_probability(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("probability must lie in (0,1), got " + std::to_string(p));
}

inline void require_nu(double nu) {
    if (!(nu > 2.0)) throw DomainError("standardized Student-t requires nu > 2, got " + std::to_string(nu));
}

// sqrt((nu-2)/nu): maps a raw t variate to unit variance.
inline double t_scale(double nu) { return std::sqrt((nu - 2.0) / nu); }

}  // namespace detail

inline double norm_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

inline double norm_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

inline double norm_quantile(double p) {
    detail::require_probability(p);
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

/// Density of the raw Student-t with nu > 0 degrees of freedom.
inline double t_pdf(double x, double nu) {
    if (!(nu > 0.0)) throw DomainError("Student-t requires nu > 0");
    return boost::math::pdf(boost::math::students_t_distribution<double>(nu), x);
}

inline double t_cdf(double x, double nu) {
    if (!(nu > 0.0)) throw DomainError("Student-t requires nu > 0");
    return boost::math::cdf(boost::math::students_t_distribution<double>(nu), x);
}

inline double t_quantile(double p, double nu) {
    detail::require_probability(p);
    if (!(nu > 0.0)) throw DomainError("Student-t requires nu > 0");
    return boost::math::quantile(boost::math::students_t_distribution<double>(nu), p);
}

/// Density of T = X * sqrt((nu-2)/nu), X ~ t(nu); unit variance.
inline double std_t_pdf(double x, double nu) {
    detail::require_nu(nu);
    const double s = detail::t_scale(nu);
    return t_pdf(x / s, nu) / s;
}

inline double std_t_cdf(double x, double nu) {
    detail::require_nu(nu);
    return t_cdf(x / detail::t_scale(nu), nu);
}

inline double std_t_quantile(double p, double nu) {
    detail::require_probability(p);
    detail::require_nu(nu);
    return t_quantile(p, nu) * detail::t_scale(nu);
}

inline double pdf(const InnovationDist& dist, double x) {
    return dist.is_student() ? std_t_pdf(x, dist.nu) : norm_pdf(x);
}

inline double cdf(const InnovationDist& dist, double x) {
    return dist.is_student() ? std_t_cdf(x, dist.nu) : norm_cdf(x);
}

inline double quantile(const InnovationDist& dist, double p) {
    return dist.is_student() ? std_t_quantile(p, dist.nu) : norm_quantile(p);
}

// ---------------------------------------------------------------------------
// Random streams
// ---------------------------------------------------------------------------

/// SplitMix64 finalizer; used to derive decorrelated stream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for sub-stream `index` of `master`. Depends only on (master, index).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(splitmix64(master) ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
}

using Rng = std::mt19937_64;

inline Rng make_stream(std::uint64_t master, std::uint64_t index) {
    return Rng(derive_seed(master, index));
}

/// n i.i.d. draws of mean + sd * Z with Z drawn from `dist` (unit variance).
inline std::vector<double> sample(const InnovationDist& dist, double mean, double sd, std::size_t n, Rng& stream) {
    if (!(sd >= 0.0)) throw DomainError("sample: sd must be non-negative");
    std::vector<double> out(n, mean);
    if (sd == 0.0) return out;
    if (dist.is_student()) {
        detail::require_nu(dist.nu);
        std::student_t_distribution<double> t(dist.nu);
        const double s = detail::t_scale(dist.nu);
        for (auto& v : out) v += sd * s * t(stream);
    } else {
        std::normal_distribution<double> normal(0.0, 1.0);
        for (auto& v : out) v += sd * normal(stream);
    }
    return out;
}

}  // namespace rhygarch
