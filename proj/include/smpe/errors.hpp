#pragma once

#include <stdexcept>
#include <string>

namespace smpe {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or dimensionally inconsistent input.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A half-split was requested on a set carrying indivisible mass.
class AtomicMass : public Error {
 public:
  using Error::Error;
};

/// No selection of the candidate correspondence matches the requested moments.
class NoSelection : public Error {
 public:
  using Error::Error;
};

/// The solver was asked to work on a game outside its scope.
class PreconditionFailed : public Error {
 public:
  using Error::Error;
};

/// An iterative procedure did not reach its target accuracy.
class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, double best_epsilon)
      : Error(what), best_epsilon_(best_epsilon) {}

  double best_epsilon() const noexcept { return best_epsilon_; }

 private:
  double best_epsilon_;
};

}  // namespace smpe
