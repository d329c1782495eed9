#pragma once

#include <stdexcept>
#include <string>

// Single exception type carrying a stable error category so the C boundary
// can map failures onto status codes without string matching.

namespace ionweave {

enum class Errc {
  invalid_argument,  // bad parameter value or inconsistent sizes
  parse,             // malformed config / file contents
  range,             // evaluation outside a model's valid range
  not_a_well,        // harmonic fit found non-positive curvature
  convergence,       // iterative solver exhausted its budget
  confinement,       // ions escape the potential's confining region
  unstable,          // non-positive-definite Hessian / imaginary mode
  singular,          // coincident ions or singular linear algebra
  capacity,          // qubit count above the dense-state cap
  layout,            // schedule structure violates its invariants
  io,                // file system failure
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool ok, Errc code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace ionweave
