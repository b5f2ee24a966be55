#pragma once

#include <stdexcept>
#include <string>

namespace sopg {

// Every failure raised by the library derives from Error. The CLI maps the
// category to a process exit code.
enum class ErrorCategory { Config, Io, Model, Protocol, Internal };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCategory::Config, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::Io, what) {}
};

class ModelError : public Error {
 public:
  explicit ModelError(const std::string& what) : Error(ErrorCategory::Model, what) {}
};

class LengthOverflowError : public ModelError {
 public:
  using ModelError::ModelError;
};

class MalformedPrefixError : public ModelError {
 public:
  using ModelError::ModelError;
};

class EmptyCorpusError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class CorruptFileError : public ModelError {
 public:
  using ModelError::ModelError;
};

class VersionMismatchError : public ModelError {
 public:
  using ModelError::ModelError;
};

class ProtocolError : public Error {
 public:
  explicit ProtocolError(const std::string& what) : Error(ErrorCategory::Protocol, what) {}
};

class TimeoutError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

class NormalizationError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

class DeterminismError : public ProtocolError {
 public:
  using ProtocolError::ProtocolError;
};

class EmptyQueueError : public Error {
 public:
  explicit EmptyQueueError(const std::string& what) : Error(ErrorCategory::Internal, what) {}
};

class StateSpaceTooLargeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class SetMismatchError : public Error {
 public:
  explicit SetMismatchError(const std::string& what) : Error(ErrorCategory::Internal, what) {}
};

class TargetUnreachableError : public Error {
 public:
  TargetUnreachableError(const std::string& what, double max_cover)
      : Error(ErrorCategory::Internal, what), max_cover_(max_cover) {}

  double max_cover() const noexcept { return max_cover_; }

 private:
  double max_cover_;
};

}  // namespace sopg
