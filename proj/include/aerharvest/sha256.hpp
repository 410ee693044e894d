#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace aerharvest {

// FIPS 180-4 SHA-256. Self-contained; used as the content digest for map
// files and cache headers.
std::array<std::uint8_t, 32> sha256(std::string_view data);

std::string hex_digest(const std::array<std::uint8_t, 32>& digest);

}  // namespace aerharvest
