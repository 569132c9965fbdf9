#include "texstat/hash.hpp"

#include <bit>
#include <cstdio>

namespace texstat {

Fnv1a& Fnv1a::update(std::string_view bytes) noexcept {
    for (unsigned char c : bytes) {
        state_ ^= c;
        state_ *= 0x100000001b3ULL;
    }
    return *this;
}

Fnv1a& Fnv1a::update(std::uint64_t value) noexcept {
    for (int i = 0; i < 8; ++i) {
        state_ ^= (value >> (8 * i)) & 0xffU;
        state_ *= 0x100000001b3ULL;
    }
    return *this;
}

Fnv1a& Fnv1a::update(double value) noexcept {
    return update(std::bit_cast<std::uint64_t>(value));
}

Fnv1a& Fnv1a::update(std::span<const double> values) noexcept {
    for (double v : values) update(v);
    return *this;
}

std::string Fnv1a::hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
    return buf;
}

}  // namespace texstat
