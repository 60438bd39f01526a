#pragma once

#include <stdexcept>
#include <string>

namespace hoi {

// Failure conditions raised by the library. One enum for the whole API so
// callers can branch on the condition without matching message text.
enum class Errc {
  length_mismatch,       // probability array does not match the state count
  negative_probability,  // a probability entry is < 0
  normalization,         // pre-normalization sum too far from 1
  empty_shape,           // a shape with no variables where one is required
  bad_cardinality,       // a cardinality of 0
  duplicate_name,        // repeated variable name in a shape
  bad_target,            // target index/name invalid for the shape
  state_cap_exceeded,    // state count above the configured cap
  invalid_subset,        // subset index out of range or wrong size
  invalid_symbol,        // symbol value outside its variable's alphabet
  overlapping_blocks,    // blocks required to be disjoint are not
  subset_too_large,      // enumeration cap exceeded (interaction information)
  missing_target,        // operation needs a designated target variable
  invalid_cut,           // K-class cut index outside 2..n-1
  shape_mismatch,        // two distributions with incompatible shapes
  invalid_argument,      // anything else rejected up front
  parse_error,           // malformed file content
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace hoi
