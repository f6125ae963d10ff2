#pragma once

#include <stdexcept>
#include <string>

namespace geoamp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigInvalid : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class IncompleteEnumeration : public Error {
 public:
  IncompleteEnumeration(const std::string& what, long found, long expected)
      : Error(what), found_(found), expected_(expected) {}
  long found() const noexcept { return found_; }
  long expected() const noexcept { return expected_; }

 private:
  long found_;
  long expected_;
};

class AccuracyNotReached : public Error {
 public:
  AccuracyNotReached(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

class OutOfChart : public Error {
 public:
  using Error::Error;
};

class OnSingularSet : public Error {
 public:
  using Error::Error;
};

class FitDegenerate : public Error {
 public:
  using Error::Error;
};

class UnboundedModel : public Error {
 public:
  using Error::Error;
};

}  // namespace geoamp
