#pragma once

#include <stdexcept>
#include <string>

namespace eduembed {

// Coarse error classes; the CLI maps each to a process exit status.
enum class ErrorKind {
  usage,    // bad invocation or configuration (exit 1)
  data,     // malformed or inconsistent input data (exit 2)
  numeric,  // runtime / numeric failure (exit 3)
  network,  // remote backend failure (exit 4)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define EDUEMBED_DEFINE_ERROR(Name, Kind)                                 \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

EDUEMBED_DEFINE_ERROR(DimensionError, numeric)
EDUEMBED_DEFINE_ERROR(DegenerateVectorError, numeric)
EDUEMBED_DEFINE_ERROR(NumericError, numeric)
EDUEMBED_DEFINE_ERROR(PreconditionError, numeric)
EDUEMBED_DEFINE_ERROR(RangeError, numeric)
EDUEMBED_DEFINE_ERROR(EmptyInputError, data)
EDUEMBED_DEFINE_ERROR(UnknownTokenError, data)
EDUEMBED_DEFINE_ERROR(ParseError, data)
EDUEMBED_DEFINE_ERROR(ValidationError, data)
EDUEMBED_DEFINE_ERROR(CapacityError, data)
EDUEMBED_DEFINE_ERROR(CompatibilityError, data)
EDUEMBED_DEFINE_ERROR(CorruptionError, data)
EDUEMBED_DEFINE_ERROR(VersionError, data)
EDUEMBED_DEFINE_ERROR(IoError, data)
EDUEMBED_DEFINE_ERROR(ConfigError, usage)
EDUEMBED_DEFINE_ERROR(NetworkError, network)

#undef EDUEMBED_DEFINE_ERROR

class TimeoutError : public NetworkError {
 public:
  using NetworkError::NetworkError;
};

class HttpStatusError : public NetworkError {
 public:
  HttpStatusError(int status, const std::string& what) : NetworkError(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

class MalformedResponseError : public NetworkError {
 public:
  using NetworkError::NetworkError;
};

}  // namespace eduembed
