// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "hlcalib/calibration.hpp"
#include "hlcalib/g2.hpp"
#include "hlcalib/parallel.hpp"
#include "hlcalib/spin7.hpp"
#include "hlcalib/variation.hpp"

using namespace hlcalib;

namespace {

constexpr double kTwoPiSq = 2.0 * std::numbers::pi * std::numbers::pi;
constexpr int kRandomFields = 50;
constexpr int kTuples = 10000;

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("%s  %2d  %-34s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool in(double x, double lo, double hi) { return x >= lo && x <= hi; }

NormalField random_field(ModelKind kind, int index) {
  const auto ki = static_cast<std::uint64_t>(kind);
  return random_normal_field(make_model(kind), derive_seed(derive_seed(0, 1000 + ki), index));
}

void criterion_identities() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<long> d(-9, 9);
  auto vec = [&](int n) {
    Vec<Rational> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = d(rng);
    return v;
  };
  const G2Structure<Rational> g2;
  const Spin7Structure<Rational> s7;
  long nonzero[3] = {0, 0, 0};
  for (int i = 0; i < kTuples; ++i) {
    nonzero[0] += g2.associative_residual(vec(7), vec(7), vec(7)) != 0;
    nonzero[1] += g2.coassociative_residual(vec(7), vec(7), vec(7), vec(7)) != 0;
    nonzero[2] += s7.cayley_residual(vec(8), vec(8), vec(8), vec(8)) != 0;
  }
  const double secs = seconds_since(t0);
  report(1, "exact Harvey-Lawson identities", nonzero[0] + nonzero[1] + nonzero[2] == 0 && secs <= 30.0,
         fmt("%d tuples each; nonzero residuals assoc/coassoc/cayley = %ld/%ld/%ld; %.1fs", kTuples, nonzero[0],
             nonzero[1], nonzero[2], secs));
}

bool canonical_ok(const VariationReport& r) {
  return std::abs(r.fd_value - kTwoPiSq) <= 1e-4 * kTwoPiSq &&
         std::abs(r.formula_value - kTwoPiSq) <= 1e-12 * kTwoPiSq && in(r.ratio, 0.999, 1.001);
}

void criterion_canonical(int id, const char* name, ModelKind kind) {
  const FlatModel m = make_model(kind);
  const NormalField v = canonical_field(m);
  const VariationReport r = compare(m, v);
  bool pass = canonical_ok(r);
  std::string detail = fmt("V=%s fd=%.10f formula=%.12f ratio=%.8f", r.field.c_str(), r.fd_value, r.formula_value,
                           r.ratio);
  if (kind == ModelKind::Associative || kind == ModelKind::Cayley) {
    pass = pass && in(r.mclean_ratio, 0.49, 0.51);
    detail += fmt(" mclean_ratio=%.6f", r.mclean_ratio);
  }
  if (kind == ModelKind::Cayley) {
    const Spin7Structure<Rational> s7;
    const auto c = s7.cross2(basis_vector<Rational>(8, 1), basis_vector<Rational>(8, 5));
    const Rational n2 = dot(c, c);
    pass = pass && n2 == 1;
    detail += " |e1 x e5|^2=" + n2.get_str();
  }
  if (kind == ModelKind::SpecialLagrangian) {
    // int |d alpha|^2 + |d * alpha|^2, assembled directly from alpha
    const FormField alpha = alpha_form(m, v);
    const FormField da = alpha.d(), dsa = alpha.hodge().d();
    const TorusGrid g(3, default_grid(v));
    const double energy = integrate(g, [&](const std::vector<double>& u) {
      return norm2(da.value(u)) + norm2(dsa.value(u));
    });
    pass = pass && std::abs(energy - kTwoPiSq) <= 1e-12 * kTwoPiSq && in(r.fd_value / energy, 0.999, 1.001);
    detail += fmt(" int(|da|^2+|d*a|^2)=%.12f", energy);
  }
  report(id, name, pass, detail);
}

void criterion_random_suite() {
  const auto t0 = Clock::now();
  int bad = 0;
  double lo = 1e300, hi = -1e300;
  for (ModelKind kind : kAllKinds) {
    const FlatModel m = make_model(kind);
    for (int i = 0; i < kRandomFields; ++i) {
      const NormalField v = random_field(kind, i);
      if (v.max_frequency() > 3 || v.modes().size() > 5) ++bad;
      const auto r = compare(m, v);
      lo = std::min(lo, r.ratio);
      hi = std::max(hi, r.ratio);
      bad += !in(r.ratio, 0.999, 1.001);
    }
  }
  const double secs = seconds_since(t0);
  report(6, "random-field suite", bad == 0 && secs <= 60.0,
         fmt("%d fields x 4 kinds; ratio in [%.9f, %.9f]; %.1fs", kRandomFields, lo, hi, secs));
}

void criterion_comass() {
  const G2Structure<double> g2;
  const Spin7Structure<double> s7;
  struct Target {
    const char* id;
    KForm<double> form;
  };
  const Target targets[] = {{"phi", g2.phi()}, {"*phi", g2.star_phi()}, {"Phi", s7.cayley()}};
  bool pass = true;
  std::string detail;
  for (int i = 0; i < 3; ++i) {
    ComassOptions opt;
    opt.restarts = 100;
    opt.seed = 7 + i;
    const auto r = comass_estimate(targets[i].form, targets[i].form.degree(), opt, targets[i].id);
    const auto& f = r.best_frame.vectors;
    const Vec<double> res = i == 0 ? g2.chi(f[0], f[1], f[2])
                            : i == 1 ? g2.tau7(f[0], f[1], f[2], f[3])
                                     : s7.tau8(f[0], f[1], f[2], f[3]);
    const double rn = std::sqrt(dot(res, res));
    pass = pass && r.restarts >= 100 && in(r.best_value, 1.0 - 1e-6, 1.0 + 1e-9) && rn <= 1e-6;
    detail += fmt("%s=%.12f (residual %.1e) ", targets[i].id, r.best_value, rn);
  }
  report(7, "comass of phi, *phi, Phi", pass, detail);
}

void criterion_pi7() {
  const Spin7Structure<double> s7;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(kPairs8, kPairs8);
  for (const auto& e : s7.star_wedge_entries()) a(e.row, e.col) += e.value;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  int minus3 = 0, plus1 = 0;
  double spread = 0.0;
  for (int i = 0; i < kPairs8; ++i) {
    const double l = es.eigenvalues()(i);
    const double err = std::min(std::abs(l + 3.0), std::abs(l - 1.0));
    spread = std::max(spread, err);
    if (err <= 1e-12) (std::abs(l + 3.0) < std::abs(l - 1.0) ? minus3 : plus1)++;
  }
  Eigen::MatrixXd p(kPairs8, kPairs8);
  for (int i = 0; i < kPairs8; ++i)
    for (int j = 0; j < kPairs8; ++j) p(i, j) = s7.pi7_matrix()[i * kPairs8 + j];
  const double idem = (p * p - p).cwiseAbs().maxCoeff();
  report(8, "pi7 spectral structure", minus3 == 7 && plus1 == 21 && spread <= 1e-12 && idem <= 1e-14,
         fmt("eigenvalues -3 x%d, +1 x%d (max deviation %.1e); |P^2-P|=%.1e", minus3, plus1, spread, idem));
}

void criterion_cartan() {
  const FlatModel m = make_model(ModelKind::Associative);
  double worst = cartan_check(m, canonical_field(m)).max_discrepancy;
  for (int i = 0; i < kRandomFields; ++i)
    worst = std::max(worst, cartan_check(m, random_field(ModelKind::Associative, i)).max_discrepancy);
  report(9, "Cartan formula for chi", worst <= 1e-5,
         fmt("d/dt chi = -D V; max discrepancy %.2e over canonical + %d random fields", worst, kRandomFields));
}

void criterion_weak_identity() {
  bool pass = true;
  std::string detail;
  for (ModelKind kind : kAllKinds) {
    const FlatModel m = make_model(kind);
    const auto r = generic_defect_rate(m, canonical_field(m));
    const double gap = std::abs(r.rate_integral - r.fd);
    pass = pass && gap <= 1e-3 * r.fd;
    detail += fmt("%s %.1e ", to_string(kind).c_str(), gap / r.fd);
  }
  report(10, "weak identity (defect rate)", pass, "relative gaps: " + detail);
}

void criterion_jacobi() {
  double worst = 0.0, worst_constant = 0.0;
  for (ModelKind kind : kAllKinds) {
    const FlatModel m = make_model(kind);
    for (int i = 0; i < kRandomFields; ++i) worst = std::max(worst, jacobi_residual(m, random_field(kind, i)));
    Vec<double> c(m.normal.size());
    for (std::size_t a = 0; a < c.size(); ++a) c[a] = 1.0 + static_cast<double>(a);
    const NormalField constant = constant_field(m, c);
    worst_constant = std::max({worst_constant, std::abs(second_variation_formula(m, constant)),
                               std::abs(jacobi_energy(m, constant))});
  }
  report(11, "Jacobi / Weitzenbock identity", worst <= 1e-8 && worst_constant <= 1e-10,
         fmt("max |formula - sum int |d_i V|^2| = %.2e; constant fields %.1e", worst, worst_constant));
}

void criterion_order() {
  const double hs[] = {1e-1, 5e-2, 2.5e-2};
  bool pass = true;
  std::string detail;
  for (ModelKind kind : kAllKinds) {
    const FlatModel m = make_model(kind);
    const NormalField v = canonical_field(m);
    const double exact = second_variation_formula(m, v);
    double e[3], raw[3];
    for (int i = 0; i < 3; ++i) {
      e[i] = std::abs(second_variation_fd(m, v, hs[i]).value - exact);
      raw[i] = std::abs(second_difference(m, v, fd_time_step(v, hs[i])) - exact);
    }
    const double order = std::min(std::log2(e[0] / e[1]), std::log2(e[1] / e[2]));
    const double raw_order = std::min(std::log2(raw[0] / raw[1]), std::log2(raw[1] / raw[2]));
    pass = pass && order >= 1.9;
    detail += fmt("%s %.2f (raw %.2f) ", to_string(kind).c_str(), order, raw_order);
  }
  report(12, "FD convergence order", pass, "observed order: " + detail);
}

}  // namespace

int main() {
  const auto t0 = Clock::now();
  criterion_identities();
  criterion_canonical(2, "associative coefficient", ModelKind::Associative);
  criterion_canonical(3, "Cayley coefficient", ModelKind::Cayley);
  criterion_canonical(4, "coassociative formula", ModelKind::Coassociative);
  criterion_canonical(5, "special Lagrangian formula", ModelKind::SpecialLagrangian);
  criterion_random_suite();
  criterion_comass();
  criterion_pi7();
  criterion_cartan();
  criterion_weak_identity();
  criterion_jacobi();
  criterion_order();
  std::printf("%d/12 criteria passed in %.1fs\n", 12 - failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
