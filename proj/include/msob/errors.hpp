#pragma once

#include <stdexcept>
#include <string>

namespace msob {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input file or unparsable specification string.
struct ParseError : Error {
    using Error::Error;
};

/// Parameter outside its documented range (n < 2, delta <= 0, ...).
struct ConfigError : Error {
    using Error::Error;
};

/// Loaded distance data violates the metric axioms; the message names the
/// offending pair or triple.
struct MetricViolationError : Error {
    using Error::Error;
};

/// Shortest-path metric requested on a graph that is not connected.
struct DisconnectedGraphError : Error {
    using Error::Error;
};

/// A partition cell carries zero total mass, so mass-weighted means over it
/// are undefined. The message names the cell.
struct ZeroMassCellError : Error {
    using Error::Error;
};

}  // namespace msob
