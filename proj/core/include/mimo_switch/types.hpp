#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace mimo_switch {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Whether receivers subtract their own transmitted signal before detection.
enum class Mode { Pnc, NonPnc };

const char* to_string(Mode mode);
Mode parse_mode(const std::string& text);

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller broke a documented precondition (bad dimensions, bad config).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Request exceeds what the implementation supports (e.g. K too large to enumerate).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// Base for failures that come from the numbers rather than the caller.
class NumericFailure : public Error {
 public:
  using Error::Error;
};

class DegenerateSolution : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

class RankError : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

class InfeasibleError : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

class ModelInconsistency : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

class NumericError : public NumericFailure {
 public:
  using NumericFailure::NumericFailure;
};

}  // namespace mimo_switch
