#pragma once

#include <cstdlib>
#include <filesystem>

namespace trinket::test {

/// Repository root: $TRINKET_SOURCE_DIR, else the configure-time path.
inline std::filesystem::path source_dir() {
  if (const char* root = std::getenv("TRINKET_SOURCE_DIR")) return root;
  return TRINKET_DEFAULT_SOURCE_DIR;
}

}  // namespace trinket::test
