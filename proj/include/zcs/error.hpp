// Copyright 2026  The zcs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace zcs {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied something outside an operation's contract. CLI exit code 2.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A numerical procedure failed to deliver its post-condition. CLI exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// A zero sits too close to a counting contour; retry on a nudged contour.
class BoundaryProximityError : public NumericalError {
 public:
  BoundaryProximityError(const std::string& what, double min_modulus)
      : NumericalError(what), min_modulus_(min_modulus) {}
  double min_modulus() const { return min_modulus_; }

 private:
  double min_modulus_;
};

// Fast sweeping did not reach the requested residual.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double residual)
      : NumericalError(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// The two travel-time estimators disagree beyond tolerance.
class AmbiguityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Bundle content does not match its manifest.
class IntegrityError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

}  // namespace zcs
