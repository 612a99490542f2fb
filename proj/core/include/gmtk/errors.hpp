#pragma once
#include <stdexcept>
#include <string>

namespace gmtk {

// Ambient dimensions above this are rejected at construction/parse time.
inline constexpr int kMaxAmbientDim = 8;

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input documents (scene files, expression strings).
struct ParseError : Error {
    using Error::Error;
};

// A precondition or declared invariant failed (with a witness when available).
struct ValidationError : Error {
    using Error::Error;
};

// A numerical procedure could not reach its contract (budget exhausted,
// non-convergence, rank deficiency).
struct NumericalError : Error {
    using Error::Error;
};

} // namespace gmtk
