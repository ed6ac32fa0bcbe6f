#include "hlcalib/torus.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "hlcalib/parallel.hpp"

namespace hlcalib {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double angle(const std::vector<int>& freq, const std::vector<double>& u) {
  double a = 0.0;
  for (std::size_t i = 0; i < freq.size(); ++i) a += freq[i] * u[i];
  return kTwoPi * a;
}

void check_point(int k, const std::vector<double>& u) {
  if (static_cast<int>(u.size()) != k) throw ShapeError("torus point has wrong dimension");
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

TrigField& TrigField::add_mode(std::vector<int> freq, Phase phase, Vec<double> coeffs) {
  if (static_cast<int>(freq.size()) != k_) throw ShapeError("TrigField: frequency vector has wrong length");
  if (static_cast<int>(coeffs.size()) != n_) throw ShapeError("TrigField: coefficient vector has wrong length");
  modes_.push_back({std::move(freq), phase, std::move(coeffs)});
  return *this;
}

int TrigField::max_frequency() const {
  int f = 0;
  for (const auto& m : modes_)
    for (int x : m.freq) f = std::max(f, std::abs(x));
  return f;
}

Vec<double> TrigField::value(const std::vector<double>& u) const {
  check_point(k_, u);
  Vec<double> out = zeros<double>(n_);
  for (const auto& m : modes_) {
    const double a = angle(m.freq, u);
    const double s = (m.phase == Phase::Cos) ? std::cos(a) : std::sin(a);
    for (int l = 0; l < n_; ++l) out[l] += s * m.coeffs[l];
  }
  return out;
}

Vec<double> TrigField::derivative(int i, const std::vector<double>& u) const {
  if (i < 1 || i > k_) throw ShapeError("TrigField::derivative: index out of range");
  check_point(k_, u);
  Vec<double> out = zeros<double>(n_);
  for (const auto& m : modes_) {
    if (m.freq[i - 1] == 0) continue;
    const double a = angle(m.freq, u);
    const double s = kTwoPi * m.freq[i - 1] * ((m.phase == Phase::Cos) ? -std::sin(a) : std::cos(a));
    for (int l = 0; l < n_; ++l) out[l] += s * m.coeffs[l];
  }
  return out;
}

std::vector<Vec<double>> TrigField::jacobian(const std::vector<double>& u) const {
  check_point(k_, u);
  std::vector<Vec<double>> out(static_cast<std::size_t>(k_), zeros<double>(n_));
  for (const auto& m : modes_) {
    const double a = angle(m.freq, u);
    const double base = kTwoPi * ((m.phase == Phase::Cos) ? -std::sin(a) : std::cos(a));
    for (int i = 0; i < k_; ++i) {
      if (m.freq[i] == 0) continue;
      const double s = base * m.freq[i];
      for (int l = 0; l < n_; ++l) out[i][l] += s * m.coeffs[l];
    }
  }
  return out;
}

TrigField TrigField::scaled(double c) const {
  TrigField out = *this;
  for (auto& m : out.modes_)
    for (auto& x : m.coeffs) x *= c;
  return out;
}

std::string TrigField::describe() const {
  if (modes_.empty()) return "0";
  std::string s;
  for (const auto& m : modes_) {
    if (!s.empty()) s += " + ";
    s += (m.phase == Phase::Cos) ? "cos(2pi<(" : "sin(2pi<(";
    for (int i = 0; i < k_; ++i) s += (i ? "," : "") + std::to_string(m.freq[i]);
    s += "),u>)*[";
    bool first = true;
    for (int l = 0; l < n_; ++l) {
      if (m.coeffs[l] == 0.0) continue;
      s += (first ? "" : " ") + fmt(m.coeffs[l]) + "*e" + std::to_string(l + 1);
      first = false;
    }
    s += "]";
  }
  return s;
}

FormField& FormField::add_mode(std::vector<int> freq, Phase phase, KForm<double> coeff) {
  if (static_cast<int>(freq.size()) != k_) throw ShapeError("FormField: frequency vector has wrong length");
  if (coeff.dim() != k_ || coeff.degree() != degree_) throw ShapeError("FormField: coefficient has wrong shape");
  modes_.push_back({std::move(freq), phase, std::move(coeff)});
  return *this;
}

int FormField::max_frequency() const {
  int f = 0;
  for (const auto& m : modes_)
    for (int x : m.freq) f = std::max(f, std::abs(x));
  return f;
}

KForm<double> FormField::value(const std::vector<double>& u) const {
  check_point(k_, u);
  KForm<double> out(k_, degree_);
  for (const auto& m : modes_) {
    const double a = angle(m.freq, u);
    const double s = (m.phase == Phase::Cos) ? std::cos(a) : std::sin(a);
    for (const auto& [mask, c] : m.coeff.terms()) out.add(mask, s * c);
  }
  return out;
}

FormField FormField::d() const {
  if (degree_ >= k_) throw ShapeError("FormField::d: form already has top degree");
  FormField out(k_, degree_ + 1);
  for (const auto& m : modes_) {
    Vec<double> fr(m.freq.begin(), m.freq.end());
    bool constant = true;
    for (int x : m.freq) constant = constant && x == 0;
    if (constant) continue;
    // d(cos a * b) = -2pi sin a (k.dx ^ b), d(sin a * b) = 2pi cos a (k.dx ^ b)
    KForm<double> c = wedge(flat(fr), m.coeff);
    c *= (m.phase == Phase::Cos) ? -kTwoPi : kTwoPi;
    if (c.is_zero()) continue;
    out.modes_.push_back({m.freq, m.phase == Phase::Cos ? Phase::Sin : Phase::Cos, std::move(c)});
  }
  return out;
}

FormField FormField::hodge(int orientation) const {
  FormField out(k_, k_ - degree_);
  for (const auto& m : modes_) out.modes_.push_back({m.freq, m.phase, hlcalib::hodge(m.coeff, orientation)});
  return out;
}

FormField FormField::laplacian() const {
  FormField out(k_, degree_);
  for (const auto& m : modes_) {
    double f2 = 0.0;
    for (int x : m.freq) f2 += static_cast<double>(x) * x;
    if (f2 == 0.0) continue;
    KForm<double> c = m.coeff;
    c *= kTwoPi * kTwoPi * f2;
    out.modes_.push_back({m.freq, m.phase, std::move(c)});
  }
  return out;
}

FormField FormField::scaled(double c) const {
  FormField out = *this;
  for (auto& m : out.modes_) m.coeff *= c;
  return out;
}

FormField FormField::operator+(const FormField& o) const {
  if (o.k_ != k_ || o.degree_ != degree_) throw ShapeError("FormField: shape mismatch");
  FormField out = *this;
  out.modes_.insert(out.modes_.end(), o.modes_.begin(), o.modes_.end());
  return out;
}

TorusGrid::TorusGrid(int dim, int points_per_circle) : k(dim), N(points_per_circle) {
  if (dim < 1 || dim > kMaxDim) throw ShapeError("TorusGrid: bad dimension");
  if (points_per_circle < 1) throw GridError("TorusGrid: need at least one point per circle");
}

long TorusGrid::size() const {
  long s = 1;
  for (int i = 0; i < k; ++i) s *= N;
  return s;
}

std::vector<double> TorusGrid::point(long index) const {
  std::vector<double> u(static_cast<std::size_t>(k));
  for (int i = k - 1; i >= 0; --i) {
    u[i] = static_cast<double>(index % N) / N;
    index /= N;
  }
  return u;
}

std::vector<double> sample(const TorusGrid& grid, const std::function<double(const std::vector<double>&)>& fn) {
  // slabs along the first coordinate
  const long slab = grid.size() / grid.N;
  const auto parts = parallel_map(static_cast<std::size_t>(grid.N), [&](std::size_t s) {
    std::vector<double> v(static_cast<std::size_t>(slab));
    for (long j = 0; j < slab; ++j) v[j] = fn(grid.point(static_cast<long>(s) * slab + j));
    return v;
  });
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(grid.size()));
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

double integrate(const TorusGrid& grid, const std::function<double(const std::vector<double>&)>& fn) {
  const auto v = sample(grid, fn);
  return pairwise_sum(v) / static_cast<double>(v.size());
}

}  // namespace hlcalib
