#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>

namespace netweave {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed arguments outside an operation's preconditions.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Input text could not be parsed. Messages carry line/field context.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input parsed but violates a domain invariant (duplicate id, self-loop, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  using Error::Error;
};

class TemplateError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

/// Failures talking to a text-generation service.
class BackendError : public Error {
 public:
  using Error::Error;
};

class AuthError : public BackendError {
 public:
  AuthError(int status, const std::string& what) : BackendError(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

class RateLimitError : public BackendError {
 public:
  RateLimitError(std::optional<std::chrono::milliseconds> retry_after, const std::string& what)
      : BackendError(what), retry_after_(retry_after) {}
  std::optional<std::chrono::milliseconds> retry_after() const noexcept { return retry_after_; }

 private:
  std::optional<std::chrono::milliseconds> retry_after_;
};

/// Connection refused, DNS failure, timeout.
class TransportError : public BackendError {
 public:
  TransportError(bool timed_out, const std::string& what)
      : BackendError(what), timed_out_(timed_out) {}
  bool timed_out() const noexcept { return timed_out_; }

 private:
  bool timed_out_;
};

/// Non-success HTTP status other than auth or rate limiting.
class HttpStatusError : public BackendError {
 public:
  HttpStatusError(int status, const std::string& what) : BackendError(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

/// Response arrived but does not have the expected shape.
class ProtocolError : public BackendError {
 public:
  using BackendError::BackendError;
};

}  // namespace netweave
