#pragma once

#include <stdexcept>
#include <string>

namespace lpkdv {

/// Lattice site (n, m). Negative coordinates mean "unknown".
struct Site {
  long n = -1;
  long m = -1;
};

std::string to_string(Site s);

/// Argument outside the domain of a formula (p = q, kappa = 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A documented precondition does not hold for the given input.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Numerical failure: non-convergence, NaN, overflow.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An internal identity that must hold analytically failed numerically.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Base for errors that carry the offending lattice site.
class SiteError : public NumericalError {
 public:
  SiteError(const std::string& what, Site where);
  Site site() const noexcept { return site_; }

 private:
  Site site_;
};

/// The quad equation cannot be solved for the requested corner.
class SingularCornerError : public SiteError {
 public:
  using SiteError::SiteError;
};

/// A denominator of the spectral coefficient a_n vanishes.
class SingularPotentialError : public SiteError {
 public:
  using SiteError::SiteError;
};

/// A denominator of a symmetry flow vanishes.
class SingularFlowError : public SiteError {
 public:
  using SiteError::SiteError;
};

}  // namespace lpkdv
