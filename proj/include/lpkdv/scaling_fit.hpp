#pragma once

#include <optional>
#include <string>
#include <vector>

namespace lpkdv {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y = slope x + intercept. Needs >= 2 points with
/// distinct x, otherwise PreconditionError.
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Fit of R ~ C h^exponent on log-log axes over the points with R > floor.
struct PowerFit {
  std::optional<double> exponent;  // empty when fewer than min_points usable
  double r2 = 0.0;
  std::size_t used = 0;
  std::string status;  // "fit", "exact", "below floor", "insufficient data"
};
PowerFit fit_power_law(const std::vector<double>& h, const std::vector<double>& R, double floor = 0.0,
                       std::size_t min_points = 2);

}  // namespace lpkdv
