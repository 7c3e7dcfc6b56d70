#pragma once

#include <stdexcept>
#include <string>

namespace factcheck {

// Base for every failure the library reports. Subclasses let callers
// (mostly the HTTP layer) map failures onto distinct outcomes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LoadError : public Error {
 public:
  using Error::Error;
};

class RetrievalError : public Error {
 public:
  RetrievalError(const std::string& what, int status = 0)
      : Error(what), status_(status) {}
  // Backend HTTP status, 0 for transport failures.
  int status() const { return status_; }

 private:
  int status_;
};

class ExtractionError : public Error {
 public:
  using Error::Error;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace factcheck
