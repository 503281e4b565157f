#pragma once

#include <stdexcept>
#include <string>

namespace signcurator {

// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

// Invalid or inconsistent configuration (bad endpoints, missing sections,
// curator/judge model collision, unknown language, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed input document. Carries a 1-based line number when known
// (0 = unknown).
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line = 0, std::size_t column = 0)
      : Error(message), line_(line), column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Well-formed input that violates a data invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Caller violated an operation precondition.
class InputError : public Error {
 public:
  using Error::Error;
};

// Filesystem failure (unreadable file, failed atomic replace, ...).
class IoError : public Error {
 public:
  using Error::Error;
};

// Transient fetcher failure during ingestion; the source can be retried.
class IngestError : public Error {
 public:
  using Error::Error;
};

// Media that cannot be decoded or sampled. Carries decoder stderr when the
// failure came from the external decoder.
class MediaError : public Error {
 public:
  explicit MediaError(const std::string& message, std::string decoder_stderr = {})
      : Error(message), decoder_stderr_(std::move(decoder_stderr)) {}
  const std::string& decoder_stderr() const { return decoder_stderr_; }

 private:
  std::string decoder_stderr_;
};

// Non-retryable HTTP failure (4xx other than 429).
class RequestError : public Error {
 public:
  RequestError(const std::string& message, int status) : Error(message), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

// Response that does not match the wire schema. Never retried.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Retries exhausted or endpoint unreachable. The pipeline treats this as an
// outage and halts after checkpointing.
class GatewayUnavailableError : public Error {
 public:
  using Error::Error;
};

// Prompt template with an unresolved or unknown placeholder.
class TemplateError : public Error {
 public:
  using Error::Error;
};

// Model reply with no parsable verdict object and no recognized sentinel.
class ResponseFormatError : public Error {
 public:
  using Error::Error;
};

// Out-of-order or terminal-state transition in the pipeline state machine.
class StateError : public Error {
 public:
  using Error::Error;
};

// Gold labels without matching predictions.
class CoverageError : public Error {
 public:
  using Error::Error;
};

// Agreement report with zero scorable pairs.
class EmptyReportError : public Error {
 public:
  using Error::Error;
};

// Optional external capability (learned-metric scorer) not reachable.
class FeatureUnavailableError : public Error {
 public:
  using Error::Error;
};

}  // namespace signcurator
