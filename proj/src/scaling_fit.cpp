#include "lpkdv/scaling_fit.hpp"

#include <algorithm>
#include <cmath>

#include "lpkdv/errors.hpp"

namespace lpkdv {

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw PreconditionError("fit_line: size mismatch");
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2) throw PreconditionError("fit_line: need at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw PreconditionError("fit_line: degenerate abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

PowerFit fit_power_law(const std::vector<double>& h, const std::vector<double>& R, double floor,
                       std::size_t min_points) {
  if (h.size() != R.size()) throw PreconditionError("fit_power_law: size mismatch");
  PowerFit out;
  if (std::all_of(R.begin(), R.end(), [](double r) { return r == 0.0; })) {
    out.status = "exact";
    return out;
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < h.size(); ++i)
    if (R[i] > floor && std::isfinite(R[i])) {
      lx.push_back(std::log(h[i]));
      ly.push_back(std::log(R[i]));
    }
  out.used = lx.size();
  if (lx.empty()) {
    out.status = "below floor";
    return out;
  }
  if (lx.size() < std::max<std::size_t>(min_points, 2)) {
    out.status = "insufficient data";
    return out;
  }
  const LinearFit f = fit_line(lx, ly);
  out.exponent = f.slope;
  out.r2 = f.r2;
  out.status = "fit";
  return out;
}

}  // namespace lpkdv
