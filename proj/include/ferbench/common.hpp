#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ferbench {

// Error taxonomy. Every throwing path in the library uses one of these so
// callers (and the CLI exit-code mapping) can tell user errors from bugs.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InputError : Error {          // unreadable/malformed input artifacts
    using Error::Error;
};
struct ContractError : Error {       // precondition violated by the caller
    using Error::Error;
};
struct SamplingError : Error {       // frame sampling impossible for a clip
    using Error::Error;
};
struct GeometryError : Error {       // degenerate geometry (bbox outside image, ...)
    using Error::Error;
};
struct AlignmentError : Error {      // degenerate eye coordinates
    using Error::Error;
};
struct AnnotationError : Error {     // adapter process/protocol failure
    using Error::Error;
};
struct FoldError : Error {           // fold construction impossible
    using Error::Error;
};
struct TrainingError : Error {       // divergence or degenerate training split
    using Error::Error;
};
struct DataError : Error {           // missing processed image or model artifact
    using Error::Error;
};
struct IntegrityError : Error {      // duplicate/conflicting result rows
    using Error::Error;
};

std::string trim(const std::string& s);
std::string to_lower(const std::string& s);
std::vector<std::string> split(const std::string& s, char sep);

// Shortest decimal representation that round-trips the double.
std::string format_double(double v);
// Fixed-point with `decimals` digits, used by report tables.
std::string format_fixed(double v, int decimals);

// Rounds half-up (0.5 -> 1), valid for the nonnegative values used here.
std::int64_t round_half_up(double v);

// Stable 64-bit mix, used to derive per-cell RNG seeds from (seed, key).
std::uint64_t hash_combine(std::uint64_t seed, const std::string& key);

}  // namespace ferbench
