#include "lpkdv/errors.hpp"

namespace lpkdv {

std::string to_string(Site s) {
  if (s.n < 0 && s.m < 0) return "(unknown site)";
  return "(n=" + std::to_string(s.n) + ", m=" + std::to_string(s.m) + ")";
}

SiteError::SiteError(const std::string& what, Site where)
    : NumericalError(what + " at " + to_string(where)), site_(where) {}

}  // namespace lpkdv
