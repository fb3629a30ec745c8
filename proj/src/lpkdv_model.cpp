#include "lpkdv/lpkdv_model.hpp"

#include <cmath>
#include <numbers>

#include "lpkdv/parallel.hpp"

namespace lpkdv {

LpkdvParams::LpkdvParams(double p, double q) : p_(p), q_(q) {
  if (!std::isfinite(p) || !std::isfinite(q)) throw DomainError("LpkdvParams: p and q must be finite");
  const double scale = 1e-14 * std::max(1.0, std::abs(p) + std::abs(q));
  if (std::abs(p - q) <= scale) throw DomainError("LpkdvParams: p == q (mu = p - q must be nonzero)");
  if (std::abs(p + q) <= scale) throw DomainError("LpkdvParams: p == -q (zeta = p + q must be nonzero)");
}

cplx quad_residual(const LpkdvParams& params, cplx u00, cplx u10, cplx u01, cplx u11) {
  const cplx W = u10 - u01, V = u11 - u00;
  return params.mu() * V + params.zeta() * W - W * V;
}

cplx quad_residual(const LatticeField& field, const LpkdvParams& params, long n, long m) {
  return quad_residual(params, field.at(n, m), field.at(n + 1, m), field.at(n, m + 1),
                       field.at(n + 1, m + 1));
}

ResidualScan max_residual(const LatticeField& field, const LpkdvParams& params, long margin) {
  const long n_lo = margin, n_hi = field.Nn() - 1 - margin;
  const long m_lo = margin, m_hi = field.Nm() - 1 - margin;
  ResidualScan out;
  if (n_hi < n_lo || m_hi < m_lo) return out;
  std::vector<ResidualScan> rows(static_cast<std::size_t>(m_hi - m_lo + 1));
  parallel_for(m_lo, m_hi + 1, [&](std::ptrdiff_t m) {
    ResidualScan& r = rows[static_cast<std::size_t>(m - m_lo)];
    for (long n = n_lo; n <= n_hi; ++n) {
      const double v = std::abs(quad_residual(params, field(n, m), field(n + 1, m), field(n, m + 1),
                                              field(n + 1, m + 1)));
      if (!(v <= r.max_abs)) {
        r.max_abs = std::isnan(v) ? INFINITY : v;
        r.where = Site{n, static_cast<long>(m)};
      }
    }
  });
  for (const auto& r : rows)
    if (r.max_abs > out.max_abs) out = r;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

bool near(cplx a, double b) { return std::abs(a - b) < 1e-12 * (1.0 + std::abs(b)); }

}  // namespace

cplx corner_solve(const LpkdvParams& params, cplx u00, cplx u10, cplx u01, Site where) {
  const cplx w = u10 - u01;
  if (near(w, params.mu())) throw SingularCornerError("corner_solve: u10 - u01 == mu", where);
  return u00 + params.zeta() * w / (w - params.mu());
}

cplx solve_corner(const LpkdvParams& params, Corner unknown, const std::array<cplx, 4>& c,
                  Site where) {
  const double mu = params.mu(), zeta = params.zeta();
  switch (unknown) {
    case Corner::c11:
      return corner_solve(params, c[0], c[1], c[2], where);
    case Corner::c00: {
      const cplx w = c[1] - c[2];
      if (near(w, mu)) throw SingularCornerError("solve_corner: u10 - u01 == mu", where);
      return c[3] - zeta * w / (w - mu);
    }
    case Corner::c01:
    case Corner::c10: {
      const cplx v = c[3] - c[0];
      if (near(v, zeta)) throw SingularCornerError("solve_corner: u11 - u00 == zeta", where);
      const cplx w = mu * v / (v - zeta);
      return unknown == Corner::c01 ? c[1] - w : c[2] + w;
    }
  }
  throw DomainError("solve_corner: bad corner");
}

namespace {

void check_finite(cplx z, Site where) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    throw SiteError("non-finite value (overflow or NaN) during evolution", where);
}

FieldKind kind_of(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  for (const auto* v : {&a, &b})
    for (const auto& z : *v)
      if (z.imag() != 0.0) return FieldKind::complex;
  return FieldKind::real;
}

}  // namespace

LatticeField evolve_ivp(const CornerData& b, const LpkdvParams& params) {
  if (b.row0.empty() || b.col0.empty()) throw PreconditionError("evolve_ivp: empty boundary data");
  if (b.row0[0] != b.col0[0]) throw PreconditionError("evolve_ivp: row0[0] != col0[0]");
  const long Nn = static_cast<long>(b.row0.size()) - 1, Nm = static_cast<long>(b.col0.size()) - 1;
  LatticeField f(Nn, Nm, kind_of(b.row0, b.col0));
  for (long n = 0; n <= Nn; ++n) f(n, 0) = b.row0[static_cast<std::size_t>(n)];
  for (long m = 0; m <= Nm; ++m) f(0, m) = b.col0[static_cast<std::size_t>(m)];

  for (long d = 2; d <= Nn + Nm; ++d) {
    const long n_lo = std::max(1L, d - Nm), n_hi = std::min(Nn, d - 1);
    if (n_hi < n_lo) continue;
    auto body = [&](std::ptrdiff_t n) {
      const long m = d - static_cast<long>(n);
      const Site s{static_cast<long>(n), m};
      const cplx v = corner_solve(params, f(n - 1, m - 1), f(n, m - 1), f(n - 1, m), s);
      check_finite(v, s);
      f(n, m) = v;
    };
    if (n_hi - n_lo >= 512)
      parallel_for(n_lo, n_hi + 1, body);
    else
      for (long n = n_lo; n <= n_hi; ++n) body(n);
  }
  return f;
}

LatticeField evolve_rows(const std::vector<cplx>& row0, const std::vector<cplx>& right_column,
                         const LpkdvParams& params) {
  if (row0.size() < 2 || right_column.empty())
    throw PreconditionError("evolve_rows: need at least two columns and one row");
  if (row0.back() != right_column.front())
    throw PreconditionError("evolve_rows: row0 and right column disagree at (Nn, 0)");
  const long Nn = static_cast<long>(row0.size()) - 1, Nm = static_cast<long>(right_column.size()) - 1;
  LatticeField f(Nn, Nm, kind_of(row0, right_column));
  for (long n = 0; n <= Nn; ++n) f(n, 0) = row0[static_cast<std::size_t>(n)];
  for (long m = 0; m <= Nm; ++m) f(Nn, m) = right_column[static_cast<std::size_t>(m)];
  for (long m = 0; m < Nm; ++m)
    for (long n = Nn - 1; n >= 0; --n) {
      const Site s{n, m + 1};
      const cplx v =
          solve_corner(params, Corner::c01, {f(n, m), f(n + 1, m), cplx{}, f(n + 1, m + 1)}, s);
      check_finite(v, s);
      f(n, m + 1) = v;
    }
  return f;
}

// ---------------------------------------------------------------------------

double dispersion(const LpkdvParams& params, double kappa) {
  if (!(kappa > 0.0) || !(kappa < std::numbers::pi - 1e-8))
    throw DomainError("dispersion: kappa must lie in (0, pi) away from pi");
  const double ratio = (params.zeta() + params.mu()) / (params.zeta() - params.mu());
  return -2.0 * std::atan(ratio * std::tan(kappa / 2.0));
}

CarrierWave::CarrierWave(const LpkdvParams& params, double kappa)
    : kappa_(kappa), omega_(dispersion(params, kappa)) {}

cplx linear_part_residual(const LpkdvParams& params, double kappa, double omega, long n, long m) {
  auto u = [&](long a, long b) { return std::polar(1.0, kappa * a - omega * b); };
  return params.mu() * (u(n + 1, m + 1) - u(n, m)) + params.zeta() * (u(n + 1, m) - u(n, m + 1));
}

}  // namespace lpkdv
