#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

namespace lpkdv {

using cplx = std::complex<double>;

enum class FieldKind { real, complex };

/// u_{n,m} on the window [0, Nn] x [0, Nm]. Storage is m-major:
/// index = m * (Nn + 1) + n, so one row u_{., m} is contiguous.
class LatticeField {
 public:
  LatticeField() = default;
  LatticeField(long Nn, long Nm, FieldKind kind = FieldKind::real);

  long Nn() const noexcept { return Nn_; }
  long Nm() const noexcept { return Nm_; }
  FieldKind kind() const noexcept { return kind_; }
  void set_kind(FieldKind k) noexcept { kind_ = k; }
  std::size_t size() const noexcept { return data_.size(); }

  bool contains(long n, long m) const noexcept {
    return n >= 0 && m >= 0 && n <= Nn_ && m <= Nm_;
  }
  /// Checked access; IndexError outside the window.
  cplx& at(long n, long m);
  const cplx& at(long n, long m) const;
  cplx& operator()(long n, long m) noexcept { return data_[index(n, m)]; }
  const cplx& operator()(long n, long m) const noexcept { return data_[index(n, m)]; }

  std::vector<cplx>& data() noexcept { return data_; }
  const std::vector<cplx>& data() const noexcept { return data_; }
  /// Row u_{0..Nn, m}.
  std::vector<cplx> row(long m) const;

  /// Max |u| over finite entries.
  double max_abs() const;
  /// True when every imaginary part is exactly zero.
  bool is_real() const;
  /// Throws ConsistencyError if kind() == real but an imaginary part is nonzero.
  void check_kind() const;

  friend bool operator==(const LatticeField&, const LatticeField&) = default;

 private:
  std::size_t index(long n, long m) const noexcept {
    return static_cast<std::size_t>(m * (Nn_ + 1) + n);
  }
  long Nn_ = 0, Nm_ = 0;
  FieldKind kind_ = FieldKind::real;
  std::vector<cplx> data_;
};

/// CSV with header `n,m,re,im`, values printed with 17 significant digits.
void write_csv(const LatticeField& f, std::ostream& os);
LatticeField read_csv(std::istream& is);

/// One JSON header line {"format":"lpkdv-field","Nn":..,"Nm":..,"kind":..}
/// followed by little-endian float64 (re, im) pairs in storage order.
void write_binary(const LatticeField& f, std::ostream& os);
LatticeField read_binary(std::istream& is);

void save_field(const LatticeField& f, const std::string& path);
LatticeField load_field(const std::string& path);

}  // namespace lpkdv
