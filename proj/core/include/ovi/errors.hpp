#pragma once

#include <stdexcept>
#include <string>

namespace ovi {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structural function evaluated outside its parameter domain.
class EvaluationError : public Error {
 public:
  using Error::Error;
};

// Numeric integration of the Young function did not reach its tolerance.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved_tolerance() const noexcept { return achieved_; }

 private:
  double achieved_;
};

class GridError : public Error {
 public:
  using Error::Error;
};

// Empty constraint set (crossing obstacles, inadmissible boundary data).
class InfeasibleError : public Error {
 public:
  InfeasibleError(const std::string& what, int node) : Error(what), node_(node) {}
  int node() const noexcept { return node_; }

 private:
  int node_;
};

// Invalid parameters handed to a constructor or solver entry point.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace ovi
