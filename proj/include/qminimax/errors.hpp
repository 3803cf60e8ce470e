#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qmm {

// Base for all numeric / guard failures raised by the library. The CLI maps
// these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class EmptyDataError : public Error {
 public:
  EmptyDataError() : Error("empty data: total count N must be at least 1") {}
};

class DegenerateFrameError : public Error {
 public:
  using Error::Error;
};

class NotInformationallyCompleteError : public Error {
 public:
  using Error::Error;
};

class TooLargeError : public Error {
 public:
  TooLargeError(const std::string& what, std::uint64_t cardinality)
      : Error(what), cardinality_(cardinality) {}
  std::uint64_t cardinality() const noexcept { return cardinality_; }

 private:
  std::uint64_t cardinality_;
};

class DegeneratePosteriorError : public Error {
 public:
  DegeneratePosteriorError(const std::string& what, double acceptance_rate)
      : Error(what), acceptance_rate_(acceptance_rate) {}
  double acceptance_rate() const noexcept { return acceptance_rate_; }

 private:
  double acceptance_rate_;
};

}  // namespace qmm
