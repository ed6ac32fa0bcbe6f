#include "hlcalib/variation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>

#include "hlcalib/g2.hpp"
#include "hlcalib/parallel.hpp"
#include "hlcalib/spin7.hpp"

namespace hlcalib {

namespace {

const G2Structure<double>& g2() {
  static const G2Structure<double> s;
  return s;
}

const Spin7Structure<double>& spin7() {
  static const Spin7Structure<double> s;
  return s;
}

void require_kind(const FlatModel& model, ModelKind kind, const char* op) {
  if (model.kind != kind) throw KindError(std::string(op) + ": not defined for the " + to_string(model.kind) + " model");
}

void require_field(const FlatModel& model, const TrigField& field) {
  if (field.k() != model.k || field.n() != model.n) throw ShapeError("field does not live on this model");
}

int resolve_grid(int grid, int max_freq, int factor, const char* op) {
  if (grid == 0) return default_grid(max_freq);
  if (grid < factor * max_freq + 1)
    throw GridError(std::string(op) + ": grid of " + std::to_string(grid) + " points is too coarse for frequency " +
                    std::to_string(max_freq));
  return grid;
}

// det(I + B) - 1 as the sum of all nonempty principal minors of B.
double det_identity_plus_minus_one(const std::vector<double>& b, int k) {
  double acc = 0.0;
  std::array<double, 16> sub;
  int idx[4];
  for (unsigned m = 1; m < (1u << k); ++m) {
    int s = 0;
    for (int i = 0; i < k; ++i)
      if (m & (1u << i)) idx[s++] = i;
    for (int r = 0; r < s; ++r)
      for (int c = 0; c < s; ++c) sub[r * s + c] = b[idx[r] * k + idx[c]];
    acc += detail::small_determinant(sub.data(), s);
  }
  return acc;
}

// Displacement derivatives d_i = t dV/du_i + t^2/2 dW/du_i.
std::vector<Vec<double>> displacements(const TrigField& field, const TrigField* accel, double t,
                                       const std::vector<double>& u) {
  auto d = field.jacobian(u);
  for (auto& v : d)
    for (auto& x : v) x *= t;
  if (accel) {
    const auto w = accel->jacobian(u);
    for (std::size_t i = 0; i < d.size(); ++i)
      for (std::size_t l = 0; l < d[i].size(); ++l) d[i][l] += 0.5 * t * t * w[i][l];
  }
  return d;
}

// G - I for G_ij = <e_ti + d_i, e_tj + d_j>.
std::vector<double> metric_defect(const FlatModel& model, const std::vector<Vec<double>>& d) {
  const int k = model.k;
  std::vector<double> b(static_cast<std::size_t>(k * k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      b[i * k + j] = d[j][model.tangent[i] - 1] + d[i][model.tangent[j] - 1] + dot(d[i], d[j]);
  return b;
}

std::vector<Vec<double>> moved_frame(const FlatModel& model, const std::vector<Vec<double>>& jac, double t) {
  std::vector<Vec<double>> a(static_cast<std::size_t>(model.k));
  for (int i = 0; i < model.k; ++i) {
    a[i] = jac[i];
    for (auto& x : a[i]) x *= t;
    a[i][model.tangent[i] - 1] += 1.0;
  }
  return a;
}

Vec<double> chi_of(const std::vector<Vec<double>>& a) { return g2().chi(a[0], a[1], a[2]); }

// |xi|^2 - cal(xi)^2 for xi = a_1 ^ .. ^ a_k, keeping the O(t^2) size accurate.
double defect_square(const FlatModel& model, const std::vector<Vec<double>>& jac, double t) {
  std::vector<Vec<double>> d = jac;
  for (auto& v : d)
    for (auto& x : v) x *= t;
  const double x = det_identity_plus_minus_one(metric_defect(model, d), model.k);
  const double cal = eval(model.calibration, Frame<double>(model.n, moved_frame(model, jac, t)));
  return x - (cal - 1.0) * (cal + 1.0);
}

std::vector<Vec<double>> sample_vectors(const TorusGrid& grid,
                                        const std::function<Vec<double>(const std::vector<double>&)>& fn) {
  const long slab = grid.size() / grid.N;
  const auto parts = parallel_map(static_cast<std::size_t>(grid.N), [&](std::size_t s) {
    std::vector<Vec<double>> v(static_cast<std::size_t>(slab));
    for (long j = 0; j < slab; ++j) v[j] = fn(grid.point(static_cast<long>(s) * slab + j));
    return v;
  });
  std::vector<Vec<double>> out;
  out.reserve(static_cast<std::size_t>(grid.size()));
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Associative:
      return "associative";
    case ModelKind::Coassociative:
      return "coassociative";
    case ModelKind::Cayley:
      return "cayley";
    case ModelKind::SpecialLagrangian:
      return "special_lagrangian";
  }
  return "?";
}

ModelKind parse_kind(const std::string& name) {
  for (ModelKind k : kAllKinds)
    if (to_string(k) == name) return k;
  throw KindError("unknown model kind: " + name);
}

FlatModel make_model(ModelKind kind) {
  FlatModel m;
  m.kind = kind;
  switch (kind) {
    case ModelKind::Associative:
      m.n = 7;
      m.k = 3;
      m.calibration_exact = standard_phi<Rational>();
      m.tangent = {1, 2, 3};
      m.normal = {4, 5, 6, 7};
      break;
    case ModelKind::Coassociative:
      m.n = 7;
      m.k = 4;
      m.calibration_exact = standard_star_phi<Rational>();
      m.tangent = {4, 5, 6, 7};
      m.normal = {1, 2, 3};
      m.l_orientation = -1;
      break;
    case ModelKind::Cayley:
      m.n = 8;
      m.k = 4;
      m.calibration_exact = standard_cayley<Rational>();
      m.tangent = {1, 2, 3, 4};
      m.normal = {5, 6, 7, 8};
      break;
    case ModelKind::SpecialLagrangian:
      m.n = 6;
      m.k = 3;
      m.calibration_exact = flat_cy_re_omega<Rational>();
      m.tangent = {1, 2, 3};
      m.normal = {4, 5, 6};
      m.omega = flat_cy_omega<double>();
      m.re_omega = flat_cy_re_omega<double>();
      break;
  }
  m.calibration = form_cast<double>(m.calibration_exact);
  return m;
}

NormalField make_normal_field(const FlatModel& model, const std::vector<TrigMode>& modes_over_normals) {
  NormalField f(model.k, model.n);
  for (const auto& mode : modes_over_normals) {
    if (mode.coeffs.size() != model.normal.size()) throw ShapeError("make_normal_field: one coefficient per normal");
    Vec<double> c = zeros<double>(model.n);
    for (std::size_t a = 0; a < model.normal.size(); ++a) c[model.normal[a] - 1] = mode.coeffs[a];
    f.add_mode(mode.freq, mode.phase, std::move(c));
  }
  return f;
}

bool is_normal(const FlatModel& model, const NormalField& field) {
  if (field.k() != model.k || field.n() != model.n) return false;
  for (const auto& mode : field.modes())
    for (int t : model.tangent)
      if (mode.coeffs[t - 1] != 0.0) return false;
  return true;
}

NormalField canonical_field(const FlatModel& model) {
  std::vector<int> freq(static_cast<std::size_t>(model.k), 0);
  freq[0] = 1;
  Vec<double> c = zeros<double>(static_cast<int>(model.normal.size()));
  c[0] = 1.0;
  return make_normal_field(model, {{freq, Phase::Sin, c}});
}

NormalField constant_field(const FlatModel& model, const Vec<double>& over_normals) {
  return make_normal_field(model, {{std::vector<int>(static_cast<std::size_t>(model.k), 0), Phase::Cos, over_normals}});
}

NormalField random_normal_field(const FlatModel& model, std::uint64_t seed, int max_freq, int max_modes) {
  if (max_freq < 1 || max_modes < 1) throw std::invalid_argument("random_normal_field: need max_freq, max_modes >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> count(1, max_modes);
  std::uniform_int_distribution<int> freq_dist(-max_freq, max_freq);
  std::uniform_int_distribution<int> phase_dist(0, 1);
  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::vector<TrigMode> modes;
  const int m = count(rng);
  for (int j = 0; j < m; ++j) {
    TrigMode mode;
    do {
      mode.freq.assign(static_cast<std::size_t>(model.k), 0);
      for (auto& x : mode.freq) x = freq_dist(rng);
    } while (std::all_of(mode.freq.begin(), mode.freq.end(), [](int x) { return x == 0; }));
    mode.phase = phase_dist(rng) ? Phase::Sin : Phase::Cos;
    mode.coeffs.resize(model.normal.size());
    for (auto& x : mode.coeffs) x = coeff(rng);
    modes.push_back(std::move(mode));
  }
  return make_normal_field(model, modes);
}

int default_grid(int max_frequency) { return std::max(9, 4 * max_frequency + 1); }
int default_grid(const NormalField& field) { return default_grid(field.max_frequency()); }

double volume_excess(const FlatModel& model, const NormalField& field, double t, int grid, const TrigField* accel) {
  require_field(model, field);
  int freq = field.max_frequency();
  if (accel) {
    require_field(model, *accel);
    freq = std::max(freq, accel->max_frequency());
  }
  const TorusGrid g(model.k, resolve_grid(grid, freq, 4, "volume"));
  return integrate(g, [&](const std::vector<double>& u) {
    const double x = det_identity_plus_minus_one(metric_defect(model, displacements(field, accel, t, u)), model.k);
    return x / (1.0 + std::sqrt(1.0 + x));
  });
}

double volume(const FlatModel& model, const NormalField& field, double t, int grid, const TrigField* accel) {
  return 1.0 + volume_excess(model, field, t, grid, accel);
}

double gradient_scale(const TrigField& field) {
  double s = 0.0;
  for (const auto& m : field.modes()) {
    double f2 = 0.0;
    for (int x : m.freq) f2 += static_cast<double>(x) * x;
    s += 2.0 * std::numbers::pi * std::sqrt(f2) * std::sqrt(dot(m.coeffs, m.coeffs));
  }
  return s;
}

double fd_time_step(const TrigField& field, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("fd step must be positive");
  return h / std::max(1.0, gradient_scale(field));
}

double second_difference(const FlatModel& model, const NormalField& field, double t, int grid) {
  if (!(t > 0.0)) throw std::invalid_argument("second_difference: t must be positive");
  return 2.0 * volume_excess(model, field, t, grid) / (t * t);
}

FdResult second_variation_fd(const FlatModel& model, const NormalField& field, double h, int grid) {
  if (!(h > 0.0)) throw std::invalid_argument("second_variation_fd: h must be positive");
  FdResult r;
  r.h = h;
  r.t_step = fd_time_step(field, h);
  r.grid = grid ? grid : default_grid(field);
  // the Gram matrix is even in t for purely normal fields
  const double coarse = second_difference(model, field, r.t_step, grid);
  const double fine = second_difference(model, field, r.t_step / 2, grid);
  r.value = (4.0 * fine - coarse) / 3.0;
  r.truncation_error = std::abs(r.value - fine);
  r.symmetric = true;
  return r;
}

FdResult second_variation_fd(const FlatModel& model, const NormalField& field, const TrigField& accel, double h,
                             int grid) {
  if (!(h > 0.0)) throw std::invalid_argument("second_variation_fd: h must be positive");
  auto five_point = [&](double s) {
    const double p1 = volume_excess(model, field, s, grid, &accel);
    const double m1 = volume_excess(model, field, -s, grid, &accel);
    const double p2 = volume_excess(model, field, 2 * s, grid, &accel);
    const double m2 = volume_excess(model, field, -2 * s, grid, &accel);
    return (-p2 + 16.0 * p1 + 16.0 * m1 - m2) / (12.0 * s * s);
  };
  FdResult r;
  r.h = h;
  r.t_step = h / std::max({1.0, gradient_scale(field), std::sqrt(gradient_scale(accel))});
  r.grid = grid ? grid : default_grid(std::max(field.max_frequency(), accel.max_frequency()));
  const double coarse = five_point(r.t_step);
  const double fine = five_point(r.t_step / 2);
  r.value = (16.0 * fine - coarse) / 15.0;
  r.truncation_error = std::abs(r.value - fine);
  r.symmetric = false;
  return r;
}

Vec<double> dirac_associative_at(const FlatModel& model, const NormalField& field, const std::vector<double>& u) {
  require_kind(model, ModelKind::Associative, "dirac_associative");
  require_field(model, field);
  const auto jac = field.jacobian(u);
  Vec<double> out = zeros<double>(7);
  for (int i = 0; i < model.k; ++i) {
    const auto c = g2().cross(basis_vector<double>(7, model.tangent[i]), jac[i]);
    for (int l = 0; l < 7; ++l) out[l] += c[l];
  }
  return out;
}

std::vector<Vec<double>> dirac_associative(const FlatModel& model, const NormalField& field, int grid) {
  require_kind(model, ModelKind::Associative, "dirac_associative");
  const TorusGrid g(model.k, resolve_grid(grid, field.max_frequency(), 2, "dirac_associative"));
  return sample_vectors(g, [&](const std::vector<double>& u) { return dirac_associative_at(model, field, u); });
}

Vec<double> dirac_cayley_at(const FlatModel& model, const NormalField& field, const std::vector<double>& u) {
  require_kind(model, ModelKind::Cayley, "dirac_cayley");
  require_field(model, field);
  const auto jac = field.jacobian(u);
  Vec<double> out = zeros<double>(kPairs8);
  for (int i = 0; i < model.k; ++i) {
    const auto c = spin7().cross2(basis_vector<double>(8, model.tangent[i]), jac[i]);
    for (int p = 0; p < kPairs8; ++p) out[p] += c[p];
  }
  return out;
}

std::vector<Vec<double>> dirac_cayley(const FlatModel& model, const NormalField& field, int grid) {
  require_kind(model, ModelKind::Cayley, "dirac_cayley");
  const TorusGrid g(model.k, resolve_grid(grid, field.max_frequency(), 2, "dirac_cayley"));
  return sample_vectors(g, [&](const std::vector<double>& u) { return dirac_cayley_at(model, field, u); });
}

FormField alpha_form(const FlatModel& model, const NormalField& field) {
  require_field(model, field);
  const KForm<double>* base = nullptr;
  const KForm<double> phi = standard_phi<double>();
  if (model.kind == ModelKind::Coassociative)
    base = &phi;
  else if (model.kind == ModelKind::SpecialLagrangian)
    base = &model.omega;
  else
    throw KindError("alpha_form: defined for the coassociative and special_lagrangian models");
  FormField out(model.k, base->degree() - 1);
  for (const auto& mode : field.modes()) {
    KForm<double> c(model.k, base->degree() - 1);
    for (int a : model.normal) {
      const double x = mode.coeffs[a - 1];
      if (x == 0.0) continue;
      KForm<double> piece = restrict_to(interior(basis_vector<double>(model.n, a), *base), model.tangent);
      piece *= x;
      c += piece;
    }
    out.add_mode(mode.freq, mode.phase, std::move(c));
  }
  return out;
}

SlPair sl_dirac(const FormField& f, const FormField& alpha, int orientation) {
  if (f.k() != 3 || alpha.k() != 3 || f.degree() != 0 || alpha.degree() != 1)
    throw ShapeError("sl_dirac: expects a function and a 1-form on T^3");
  SlPair out;
  out.f = alpha.hodge(orientation).d().hodge(orientation);
  out.alpha = f.d().scaled(-1.0) - alpha.d().hodge(orientation);
  return out;
}

double second_variation_formula(const FlatModel& model, const NormalField& field, int grid) {
  require_field(model, field);
  const TorusGrid g(model.k, resolve_grid(grid, field.max_frequency(), 2, "second_variation_formula"));
  switch (model.kind) {
    case ModelKind::Associative:
      return integrate(g, [&](const std::vector<double>& u) {
        const auto v = dirac_associative_at(model, field, u);
        return dot(v, v);
      });
    case ModelKind::Cayley:
      return integrate(g, [&](const std::vector<double>& u) {
        const auto v = dirac_cayley_at(model, field, u);
        return dot(v, v);
      });
    case ModelKind::Coassociative: {
      const FormField da = alpha_form(model, field).d();
      return integrate(g, [&](const std::vector<double>& u) { return norm2(da.value(u)); });
    }
    case ModelKind::SpecialLagrangian: {
      const FormField alpha = alpha_form(model, field);
      const FormField da = alpha.d();
      const FormField dsa = alpha.hodge(model.l_orientation).d();
      return integrate(g, [&](const std::vector<double>& u) { return norm2(da.value(u)) + norm2(dsa.value(u)); });
    }
  }
  return 0.0;
}

double jacobi_energy(const FlatModel& model, const NormalField& field, int grid) {
  require_field(model, field);
  const TorusGrid g(model.k, resolve_grid(grid, field.max_frequency(), 2, "jacobi_energy"));
  return integrate(g, [&](const std::vector<double>& u) {
    double acc = 0.0;
    for (const auto& v : field.jacobian(u)) acc += dot(v, v);
    return acc;
  });
}

double jacobi_residual(const FlatModel& model, const NormalField& field, int grid) {
  return std::abs(second_variation_formula(model, field, grid) - jacobi_energy(model, field, grid));
}

double mclean_coefficient(ModelKind kind) {
  return (kind == ModelKind::Associative || kind == ModelKind::Cayley) ? 2.0 : 1.0;
}

VariationReport compare(const FlatModel& model, const NormalField& field, double h, int grid, double tol,
                        double zero_tol) {
  VariationReport r;
  r.kind = model.kind;
  r.field = field.describe();
  r.grid = grid ? grid : default_grid(field);
  r.fd_step = h;
  r.tolerance = tol;
  r.zero_tolerance = zero_tol;
  const FdResult fd = second_variation_fd(model, field, h, r.grid);
  r.fd_value = fd.value;
  r.fd_error_estimate = fd.truncation_error;
  r.formula_value = second_variation_formula(model, field, r.grid);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (r.formula_value != 0.0) {
    r.ratio = r.fd_value / r.formula_value;
    r.mclean_ratio = r.fd_value / (mclean_coefficient(model.kind) * r.formula_value);
  } else {
    r.ratio = nan;
    r.mclean_ratio = nan;
  }
  if (std::abs(r.formula_value) <= zero_tol)
    r.pass = std::abs(r.fd_value) <= zero_tol;
  else
    r.pass = std::abs(r.ratio - 1.0) <= tol;
  return r;
}

CartanResult cartan_check(const FlatModel& model, const NormalField& field, double h, int grid) {
  require_kind(model, ModelKind::Associative, "cartan_check");
  require_field(model, field);
  if (!(h > 0.0)) throw std::invalid_argument("cartan_check: h must be positive");
  const TorusGrid g(model.k, resolve_grid(grid, field.max_frequency(), 2, "cartan_check"));
  const double t = fd_time_step(field, h);
  CartanResult r;
  // per point: (discrepancy, opposite discrepancy, |D V|_inf)
  const auto rows = sample_vectors(g, [&](const std::vector<double>& u) {
    const auto jac = field.jacobian(u);
    auto central = [&](double s) {
      const auto p = chi_of(moved_frame(model, jac, s));
      const auto m = chi_of(moved_frame(model, jac, -s));
      Vec<double> out(7);
      for (int l = 0; l < 7; ++l) out[l] = (p[l] - m[l]) / (2 * s);
      return out;
    };
    const auto coarse = central(t), fine = central(t / 2);
    const auto dv = dirac_associative_at(model, field, u);
    Vec<double> out(3, 0.0);
    for (int l = 0; l < 7; ++l) {
      const double deriv = (4.0 * fine[l] - coarse[l]) / 3.0;
      out[0] = std::max(out[0], std::abs(deriv - r.sign * dv[l]));
      out[1] = std::max(out[1], std::abs(deriv + r.sign * dv[l]));
      out[2] = std::max(out[2], std::abs(dv[l]));
    }
    return out;
  });
  for (const auto& row : rows) {
    r.max_discrepancy = std::max(r.max_discrepancy, row[0]);
    r.max_discrepancy_opposite = std::max(r.max_discrepancy_opposite, row[1]);
    r.max_dirac = std::max(r.max_dirac, row[2]);
  }
  return r;
}

DefectRate generic_defect_rate(const FlatModel& model, const NormalField& field, double h, int grid) {
  require_field(model, field);
  if (!(h > 0.0)) throw std::invalid_argument("generic_defect_rate: h must be positive");
  const int n_grid = resolve_grid(grid, field.max_frequency(), 4, "generic_defect_rate");
  const TorusGrid g(model.k, n_grid);
  const double t = fd_time_step(field, h);
  DefectRate r;
  r.rate_integral = integrate(g, [&](const std::vector<double>& u) {
    const auto jac = field.jacobian(u);
    auto rate2 = [&](double s) {
      return (defect_square(model, jac, s) + defect_square(model, jac, -s)) / (2.0 * s * s);
    };
    return (4.0 * rate2(t / 2) - rate2(t)) / 3.0;
  });
  r.fd = second_variation_fd(model, field, h, n_grid).value;
  return r;
}

SplittingCheck cayley_splitting_check(const FlatModel& model) {
  require_kind(model, ModelKind::Cayley, "cayley_splitting_check");
  const auto& s = spin7();
  std::vector<Vec<double>> normal_part, minus_part;
  for (int i : model.tangent)
    for (int a : model.normal)
      normal_part.push_back(s.cross2(basis_vector<double>(8, i), basis_vector<double>(8, a)));
  // anti-self-dual 2-forms on L, pushed into R^8 and projected to Lambda^2_7
  for (unsigned m = 0; m < (1u << model.k); ++m) {
    if (std::popcount(m) != 2) continue;
    const KForm<double> beta = KForm<double>::unit(model.k, static_cast<Mask>(m));
    const KForm<double> asd = beta - hodge(beta, model.l_orientation);
    KForm<double> ambient(8, 2);
    for (const auto& [mask, c] : asd.terms()) {
      const auto idx = indices_of(mask);
      ambient.add(mask_of({model.tangent[idx[0] - 1], model.tangent[idx[1] - 1]}), c);
    }
    minus_part.push_back(s.pi7(to_dense2(ambient)));
  }
  SplittingCheck r;
  for (const auto& x : normal_part)
    for (const auto& y : minus_part) r.max_overlap = std::max(r.max_overlap, std::abs(dot(x, y)));
  auto rank = [](const std::vector<Vec<double>>& rows) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), kPairs8);
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (int c = 0; c < kPairs8; ++c) m(static_cast<Eigen::Index>(r), c) = rows[r][c];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    lu.setThreshold(1e-10);
    return static_cast<int>(lu.rank());
  };
  r.rank_normal_part = rank(normal_part);
  r.rank_lambda_minus = rank(minus_part);
  std::vector<Vec<double>> all = normal_part;
  all.insert(all.end(), minus_part.begin(), minus_part.end());
  r.rank_total = rank(all);
  return r;
}

double alpha_self_duality_defect(const FlatModel& model, int orientation) {
  require_kind(model, ModelKind::Coassociative, "alpha_self_duality_defect");
  const KForm<double> phi = standard_phi<double>();
  double worst = 0.0;
  for (int a : model.normal) {
    const KForm<double> alpha = restrict_to(interior(basis_vector<double>(model.n, a), phi), model.tangent);
    const KForm<double> diff = hodge(alpha, orientation) - alpha;
    for (const auto& [m, c] : diff.terms()) worst = std::max(worst, std::abs(c));
  }
  return worst;
}

}  // namespace hlcalib
