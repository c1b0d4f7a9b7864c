#pragma once

#include "doctest.h"
#include "trinket/common/error.hpp"

namespace trinket::test {

/// Runs fn and returns the ErrorCode it threw; fails the test when nothing
/// (or something other than trinket::Error) was thrown.
template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected trinket::Error");
  return ErrorCode::FormatError;
}

}  // namespace trinket::test
