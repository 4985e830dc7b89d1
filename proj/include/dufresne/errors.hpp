#pragma once

#include <stdexcept>
#include <string>

namespace dufresne {

// Root of every error raised by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument at a pole of Gamma or of a hypergeometric denominator.
class pole_error : public error {
 public:
  using error::error;
};

// Argument outside the region where the chosen algorithm is valid.
class domain_error : public error {
 public:
  using error::error;
};

// Iteration or series cap hit before the stopping rule was met.
class convergence_error : public error {
 public:
  using error::error;
};

// Malformed parameter lists (e.g. complex entries without their conjugate).
class parameter_error : public error {
 public:
  using error::error;
};

class overflow_error : public error {
 public:
  using error::error;
};

// Law has no realization as a product of beta and gamma variables.
class not_samplable_error : public error {
 public:
  using error::error;
};

class unsupported_error : public error {
 public:
  using error::error;
};

// Two root-finding routes disagree on the same polynomial.
class solver_disagreement_error : public error {
 public:
  using error::error;
};

}  // namespace dufresne
