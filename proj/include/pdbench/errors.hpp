#pragma once

#include <stdexcept>
#include <string>

namespace pdbench {

/// Base class of every error raised by the workbench.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MalformedTree : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class InvalidNet : public Error {
 public:
  using Error::Error;
};

class EmptyLanguage : public Error {
 public:
  using Error::Error;
};

class AllZero : public Error {
 public:
  using Error::Error;
};

class InfeasibleSpec : public Error {
 public:
  using Error::Error;
};

class TooSmall : public Error {
 public:
  using Error::Error;
};

class Inapplicable : public Error {
 public:
  using Error::Error;
};

class PoolExhausted : public Error {
 public:
  using Error::Error;
};

class MinerFailure : public Error {
 public:
  using Error::Error;
};

class AllUndefined : public Error {
 public:
  using Error::Error;
};

class DegenerateData : public Error {
 public:
  using Error::Error;
};

class ConfigInvalid : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace pdbench
