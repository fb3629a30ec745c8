#include "lpkdv/lattice_field.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "lpkdv/errors.hpp"

namespace lpkdv {

LatticeField::LatticeField(long Nn, long Nm, FieldKind kind) : Nn_(Nn), Nm_(Nm), kind_(kind) {
  if (Nn < 0 || Nm < 0) throw DomainError("LatticeField: negative window extent");
  data_.assign(static_cast<std::size_t>((Nn + 1) * (Nm + 1)), cplx(0.0, 0.0));
}

cplx& LatticeField::at(long n, long m) {
  if (!contains(n, m))
    throw IndexError("LatticeField: " + to_string(Site{n, m}) + " outside [0," +
                     std::to_string(Nn_) + "]x[0," + std::to_string(Nm_) + "]");
  return data_[index(n, m)];
}

const cplx& LatticeField::at(long n, long m) const {
  return const_cast<LatticeField*>(this)->at(n, m);
}

std::vector<cplx> LatticeField::row(long m) const {
  if (m < 0 || m > Nm_) throw IndexError("LatticeField: row " + std::to_string(m) + " outside window");
  const auto b = data_.begin() + static_cast<std::ptrdiff_t>(index(0, m));
  return std::vector<cplx>(b, b + Nn_ + 1);
}

double LatticeField::max_abs() const {
  double mx = 0.0;
  for (const auto& z : data_)
    if (std::isfinite(z.real()) && std::isfinite(z.imag())) mx = std::max(mx, std::abs(z));
  return mx;
}

bool LatticeField::is_real() const {
  for (const auto& z : data_)
    if (z.imag() != 0.0) return false;
  return true;
}

void LatticeField::check_kind() const {
  if (kind_ == FieldKind::real && !is_real())
    throw ConsistencyError("LatticeField: real-kind field has nonzero imaginary parts");
}

// ---------------------------------------------------------------------------

void write_csv(const LatticeField& f, std::ostream& os) {
  f.check_kind();
  os << "n,m,re,im\n";
  char buf[96];
  for (long m = 0; m <= f.Nm(); ++m)
    for (long n = 0; n <= f.Nn(); ++n) {
      const cplx z = f(n, m);
      std::snprintf(buf, sizeof buf, "%ld,%ld,%.17g,%.17g\n", n, m, z.real(), z.imag());
      os << buf;
    }
}

LatticeField read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("n,m,re,im", 0) != 0)
    throw PreconditionError("read_csv: missing header n,m,re,im");
  struct Entry {
    long n, m;
    double re, im;
  };
  std::vector<Entry> entries;
  long Nn = -1, Nm = -1;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    Entry e{};
    if (std::sscanf(line.c_str(), "%ld,%ld,%lf,%lf", &e.n, &e.m, &e.re, &e.im) != 4)
      throw PreconditionError("read_csv: malformed line '" + line + "'");
    if (e.n < 0 || e.m < 0) throw PreconditionError("read_csv: negative index");
    Nn = std::max(Nn, e.n);
    Nm = std::max(Nm, e.m);
    entries.push_back(e);
  }
  if (entries.empty()) throw PreconditionError("read_csv: no data");
  if (entries.size() != static_cast<std::size_t>((Nn + 1) * (Nm + 1)))
    throw PreconditionError("read_csv: window is not fully populated");
  LatticeField f(Nn, Nm, FieldKind::real);
  for (const auto& e : entries) f(e.n, e.m) = cplx(e.re, e.im);
  f.set_kind(f.is_real() ? FieldKind::real : FieldKind::complex);
  return f;
}

namespace {

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffu) << (8 * (7 - i));
  return r;
}

void put_double(std::ostream& os, double x) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, 8);
  bits = to_little(bits);
  os.write(reinterpret_cast<const char*>(&bits), 8);
}

double get_double(std::istream& is) {
  std::uint64_t bits;
  if (!is.read(reinterpret_cast<char*>(&bits), 8)) throw PreconditionError("read_binary: truncated payload");
  bits = to_little(bits);
  double x;
  std::memcpy(&x, &bits, 8);
  return x;
}

}  // namespace

void write_binary(const LatticeField& f, std::ostream& os) {
  f.check_kind();
  nlohmann::json h = {{"format", "lpkdv-field"},
                      {"Nn", f.Nn()},
                      {"Nm", f.Nm()},
                      {"kind", f.kind() == FieldKind::real ? "real" : "complex"},
                      {"layout", "m-major, little-endian float64 (re, im)"}};
  os << h.dump() << '\n';
  for (const auto& z : f.data()) {
    put_double(os, z.real());
    put_double(os, z.imag());
  }
}

LatticeField read_binary(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw PreconditionError("read_binary: missing header");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("read_binary: bad header: ") + e.what());
  }
  if (h.value("format", "") != "lpkdv-field") throw PreconditionError("read_binary: unknown format");
  LatticeField f(h.at("Nn").get<long>(), h.at("Nm").get<long>(),
                 h.at("kind").get<std::string>() == "real" ? FieldKind::real : FieldKind::complex);
  for (auto& z : f.data()) {
    const double re = get_double(is);
    z = cplx(re, get_double(is));
  }
  f.check_kind();
  return f;
}

namespace {
bool is_csv(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}
}  // namespace

void save_field(const LatticeField& f, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw PreconditionError("cannot open " + path + " for writing");
  if (is_csv(path))
    write_csv(f, os);
  else
    write_binary(f, os);
}

LatticeField load_field(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw PreconditionError("cannot open " + path);
  return is_csv(path) ? read_csv(is) : read_binary(is);
}

}  // namespace lpkdv
