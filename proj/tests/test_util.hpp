#ifndef SHAPEDENS_TESTS_TEST_UTIL_HPP_
#define SHAPEDENS_TESTS_TEST_UTIL_HPP_

#include <optional>
#include <utility>

#include "shapedens/errors.hpp"

namespace testutil {

// Runs f and reports the shapedens error code it threw, if any.
template <typename F>
std::optional<shapedens::Errc> thrown_code(F&& f) {
  try {
    std::forward<F>(f)();
  } catch (const shapedens::Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace testutil

#endif  // SHAPEDENS_TESTS_TEST_UTIL_HPP_
