#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trinket::auth {

std::string base64_encode(std::span<const std::uint8_t> bytes);
/// Standard alphabet with padding; an optional "data:...;base64," prefix is
/// skipped. Throws FormatError on anything else.
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace trinket::auth
