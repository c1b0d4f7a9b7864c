#include "trinket/authsvc/base64.hpp"

#include <openssl/evp.h>

#include "trinket/common/error.hpp"

namespace trinket::auth {

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.starts_with("data:")) {
    const auto comma = text.find(',');
    if (comma == std::string_view::npos || text.substr(0, comma).find(";base64") == std::string_view::npos)
      throw Error(ErrorCode::FormatError, "data URL is not base64");
    text.remove_prefix(comma + 1);
  }
  if (text.size() % 4 != 0) throw Error(ErrorCode::FormatError, "base64 length is not a multiple of 4");
  std::size_t pad = 0;
  while (pad < 2 && pad < text.size() && text[text.size() - 1 - pad] == '=') ++pad;
  if (text.substr(0, text.size() - pad).find('=') != std::string_view::npos)
    throw Error(ErrorCode::FormatError, "misplaced base64 padding");
  std::vector<std::uint8_t> out(text.size() / 4 * 3);
  const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  // EVP_DecodeBlock skips surrounding whitespace, so it must see none.
  if (n < 0 || static_cast<std::size_t>(n) != out.size() || text.find_first_of(" \t\r\n") != std::string_view::npos)
    throw Error(ErrorCode::FormatError, "invalid base64 character");
  out.resize(out.size() - pad);
  return out;
}

}  // namespace trinket::auth
