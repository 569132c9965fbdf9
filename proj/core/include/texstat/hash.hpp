#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace texstat {

/// 64-bit FNV-1a. Used for config and filterbank identifiers, not security.
class Fnv1a {
public:
    Fnv1a& update(std::string_view bytes) noexcept;
    Fnv1a& update(std::span<const double> values) noexcept;
    Fnv1a& update(double value) noexcept;
    Fnv1a& update(std::uint64_t value) noexcept;

    std::uint64_t digest() const noexcept { return state_; }
    std::string hex() const;

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace texstat
