#pragma once

#include <doctest.h>

#include "core/errors.hpp"

// Shared helpers: strict relative-tolerance comparison (no absolute floor)
// and an assertion that a callable throws a library error of a given code.

inline doctest::Approx rel(double expected, double tol) {
  return doctest::Approx(expected).epsilon(tol).scale(0.0);
}

template <typename F>
void expect_error(ionweave::Errc code, F&& fn) {
  try {
    fn();
    FAIL_CHECK("expected an error, none was thrown");
  } catch (const ionweave::Error& e) {
    CHECK(static_cast<int>(e.code()) == static_cast<int>(code));
  }
}
