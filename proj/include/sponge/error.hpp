#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sponge {

class SpongeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input document (wrong types, ragged shapes, missing keys).
class SchemaError : public SpongeError {
public:
    using SpongeError::SpongeError;
};

/// A geometric constraint on the sponge is violated.
/// `path` is 1-based and addresses the offending entry at `level`.
class ConstraintError : public SpongeError {
public:
    ConstraintError(std::string constraint_id, std::string level, std::vector<int> path,
                    const std::string& message)
        : SpongeError(message),
          constraint_id_(std::move(constraint_id)),
          level_(std::move(level)),
          path_(std::move(path)) {}

    const std::string& constraint_id() const noexcept { return constraint_id_; }
    const std::string& level() const noexcept { return level_; }
    const std::vector<int>& path() const noexcept { return path_; }

private:
    std::string constraint_id_;
    std::string level_;
    std::vector<int> path_;
};

/// Caller violated an operation's precondition.
class PreconditionError : public SpongeError {
public:
    using SpongeError::SpongeError;
};

/// An iterative method failed to meet its tolerance.
class NumericError : public SpongeError {
public:
    using SpongeError::SpongeError;
};

/// No sign change found while expanding a monotone bracket.
class BracketNotFound : public NumericError {
public:
    using NumericError::NumericError;
};

class IoError : public SpongeError {
public:
    using SpongeError::SpongeError;
};

}  // namespace sponge
