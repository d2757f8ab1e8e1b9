#ifndef SEQMINE_ERRORS_HPP
#define SEQMINE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace seqmine {

/// Base type for everything thrown by the library. The CLI maps the
/// subtypes below onto distinct process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dimension or rank disagreement between operands.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Value-domain violation: non-finite numbers, log of a non-positive
/// input, invalid hyperparameters.
class ValueError : public Error {
public:
    using Error::Error;
};

/// Index or slice outside the valid range.
class BoundsError : public Error {
public:
    using Error::Error;
};

/// Misuse of the autodiff tape (non-scalar loss, consumed graph).
class GraphError : public Error {
public:
    using Error::Error;
};

/// Malformed input text; the message carries a line number where possible.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Filesystem failures and corrupt or truncated binary artifacts.
class IoError : public Error {
public:
    using Error::Error;
};

/// Invalid run specification handed to the CLI layer.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace seqmine

#endif
