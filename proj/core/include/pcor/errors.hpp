#ifndef PCOR_ERRORS_HPP
#define PCOR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pcor {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Schema construction or lookup failure (unknown attribute/value, bad domain).
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Data-file ingestion failure; messages name the offending row and column.
class IngestError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration (bad epsilon, fingerprint mismatch, missing target).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Exponential-mechanism failure: empty candidate list or no finite-utility candidate.
class MechanismError : public Error {
 public:
  using Error::Error;
};

/// Sampler failure: exhausted attempts, no starting context, violated precondition.
class SamplingError : public Error {
 public:
  using Error::Error;
};

/// Filesystem-level failure; messages carry the path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pcor

#endif  // PCOR_ERRORS_HPP
