#pragma once

#include "rhygarch/dist.hpp"
#include "rhygarch/errors.hpp"
#include "rhygarch/model.hpp"
#include "rhygarch/series.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rhygarch {

inline constexpr std::size_t kDefaultBurnIn = 2000;

struct SimulateOptions {
    std::size_t burn_in = kDefaultBurnIn;
    std::size_t truncation = kDefaultTruncation;
    bool keep_latent = true;
    // Simulate even when phi * psi(1) >= 1; the presample log x is then 0.
    bool allow_nonstationary = false;
};

namespace detail {

// init + sum_j a[j] b[j], accumulated left to right. The order matches
// filter_log_h (farthest lag first), so a path's true h_{T+1} and the
// filtered forecast from the same history agree bit for bit once T >= K.
inline double accumulate_lags(double init, const double* a, const double* b, std::size_t n) {
    double acc = init;
    for (std::size_t j = 0; j < n; ++j) acc += a[j] * b[j];
    return acc;
}

}  // namespace detail

/// Stream indices derived from the path seed.
inline constexpr std::uint64_t kReturnShockStream = 0;
inline constexpr std::uint64_t kMeasurementNoiseStream = 1;

/// Simulate T observations after discarding burn_in. sigma_u = 0 is accepted
/// here (noise-free measurement equation) even though estimation needs sigma_u > 0.
inline SeriesPair simulate(const RhygarchParams& params, std::size_t T, std::uint64_t seed,
                           const SimulateOptions& opt = {}) {
    if (T < 1) throw DomainError("simulate: T must be >= 1");
    RhygarchParams checked = params;
    if (checked.sigma_u == 0.0) checked.sigma_u = 1.0;
    if (const auto issues = validate(checked); !issues.empty())
        throw DomainError("simulate: invalid parameters: " + issues.front());

    const std::size_t K = opt.truncation;
    const PsiWeights psi = params.psi(K);
    double presample = 0.0;
    if (params.phi * psi.partial_sum >= 1.0) {
        if (!opt.allow_nonstationary)
            throw NonStationaryError("simulate: phi * psi(1) = " + std::to_string(params.phi * psi.partial_sum) +
                                     " >= 1; first-moment condition fails");
    } else {
        presample = implied_means(params, K).mean_log_x;
    }

    const std::size_t n = opt.burn_in + T;
    Rng z_stream = make_stream(seed, kReturnShockStream);
    Rng u_stream = make_stream(seed, kMeasurementNoiseStream);
    const std::vector<double> z = sample(params.innovation, 0.0, 1.0, n, z_stream);
    const std::vector<double> u = sample(InnovationDist::gaussian(), 0.0, params.sigma_u, n, u_stream);

    // psi_rev[j] = psi_{K-j}, so log h_t = omega + dot(psi_rev, log_x[t .. t+K)) with
    // log_x holding K presample values followed by the simulated path.
    std::vector<double> psi_rev(psi.weights.rbegin(), psi.weights.rend());
    std::vector<double> log_x(K + n, presample);
    std::vector<double> log_h(n);
    for (std::size_t t = 0; t < n; ++t) {
        log_h[t] = detail::accumulate_lags(params.omega, psi_rev.data(), log_x.data() + t, K);
        const double zt = z[t];
        log_x[K + t] = params.xi + params.phi * log_h[t] + params.tau1 * zt + params.tau2 * (zt * zt - 1.0) + u[t];
    }
    const double next_log_h = detail::accumulate_lags(params.omega, psi_rev.data(), log_x.data() + n, K);

    SeriesPair out;
    out.seed = seed;
    out.burn_in = opt.burn_in;
    out.truncation = K;
    out.returns.resize(T);
    out.realized.resize(T);
    for (std::size_t t = 0; t < T; ++t) {
        const std::size_t s = opt.burn_in + t;
        out.returns[t] = std::exp(0.5 * log_h[s]) * z[s];
        out.realized[t] = std::exp(log_x[K + s]);
    }
    out.next_h = std::exp(next_log_h);
    if (opt.keep_latent) {
        out.latent_h.emplace(T);
        out.latent_z.emplace(z.begin() + static_cast<std::ptrdiff_t>(opt.burn_in), z.end());
        out.latent_u.emplace(u.begin() + static_cast<std::ptrdiff_t>(opt.burn_in), u.end());
        for (std::size_t t = 0; t < T; ++t) (*out.latent_h)[t] = std::exp(log_h[opt.burn_in + t]);
    }
    return out;
}

}  // namespace rhygarch
