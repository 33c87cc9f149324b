#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rhygarch {

/// Argument outside the mathematical domain of an operation (p not in (0,1), nu <= 2, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Malformed or inadmissible input data. Carries the offending position when known.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what, std::size_t position = npos)
        : std::runtime_error(what), position_(position) {}

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    /// Zero-based observation index or one-based file line, depending on the producer.
    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Parameters violate the first-moment stationarity condition.
class NonStationaryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace rhygarch
