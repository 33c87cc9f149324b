#pragma once

#include "rhygarch/errors.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rhygarch {

/// Aligned daily returns (percent log-returns) and realized measures, with the
/// latent series attached when the data come from the simulator.
struct SeriesPair {
    std::vector<double> returns;
    std::vector<double> realized;
    std::optional<std::vector<double>> latent_h;
    std::optional<std::vector<double>> latent_z;
    std::optional<std::vector<double>> latent_u;
    std::optional<double> next_h;  // true h_{T+1} of a simulated path
    std::uint64_t seed = 0;
    std::size_t burn_in = 0;
    std::size_t truncation = 0;

    std::size_t size() const noexcept { return returns.size(); }
};

/// Throws DataError (position = zero-based index) on the first violated invariant.
inline void check_series(const SeriesPair& s) {
    if (s.returns.empty()) throw DataError("series is empty");
    if (s.returns.size() != s.realized.size())
        throw DataError("returns and realized have different lengths (" + std::to_string(s.returns.size()) + " vs " +
                        std::to_string(s.realized.size()) + ")");
    for (std::size_t t = 0; t < s.size(); ++t) {
        if (!std::isfinite(s.returns[t])) throw DataError("non-finite return at index " + std::to_string(t), t);
        if (!(s.realized[t] > 0.0) || !std::isfinite(s.realized[t]))
            throw DataError("realized measure must be positive and finite at index " + std::to_string(t), t);
    }
    if (s.latent_h) {
        for (std::size_t t = 0; t < s.latent_h->size(); ++t)
            if (!((*s.latent_h)[t] > 0.0)) throw DataError("latent h must be positive at index " + std::to_string(t), t);
    }
}

}  // namespace rhygarch
