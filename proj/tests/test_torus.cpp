#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "hlcalib/parallel.hpp"
#include "hlcalib/torus.hpp"

using namespace hlcalib;

namespace {

constexpr double kPi = std::numbers::pi;

TrigField random_trig(std::mt19937_64& rng, int k, int n, int modes, int fmax) {
  std::uniform_int_distribution<int> f(-fmax, fmax);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  TrigField out(k, n);
  for (int m = 0; m < modes; ++m) {
    std::vector<int> freq(static_cast<std::size_t>(k));
    for (auto& x : freq) x = f(rng);
    Vec<double> co(static_cast<std::size_t>(n));
    for (auto& x : co) x = c(rng);
    out.add_mode(freq, m % 2 ? Phase::Sin : Phase::Cos, co);
  }
  return out;
}

FormField random_form_field(std::mt19937_64& rng, int k, int degree, int modes, int fmax) {
  std::uniform_int_distribution<int> f(-fmax, fmax);
  std::uniform_real_distribution<double> c(-1.0, 1.0);
  FormField out(k, degree);
  for (int m = 0; m < modes; ++m) {
    std::vector<int> freq(static_cast<std::size_t>(k));
    for (auto& x : freq) x = f(rng);
    KForm<double> coeff(k, degree);
    for (unsigned mask = 0; mask < (1u << k); ++mask)
      if (degree_of(static_cast<Mask>(mask)) == degree) coeff.add(static_cast<Mask>(mask), c(rng));
    out.add_mode(freq, m % 2 ? Phase::Sin : Phase::Cos, coeff);
  }
  return out;
}

double max_coeff(const KForm<double>& a) {
  double m = 0.0;
  for (const auto& [mask, c] : a.terms()) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace

TEST_CASE("trig field values and exact derivatives") {
  TrigField v(3, 7);
  v.add_mode({1, 0, 0}, Phase::Sin, basis_vector<double>(7, 4));
  const std::vector<double> u{0.1, 0.7, 0.3};
  CHECK(v.value(u)[3] == doctest::Approx(std::sin(2 * kPi * 0.1)));
  CHECK(v.derivative(1, u)[3] == doctest::Approx(2 * kPi * std::cos(2 * kPi * 0.1)));
  CHECK(v.derivative(2, u)[3] == 0.0);
  CHECK(v.max_frequency() == 1);
  CHECK_FALSE(v.is_constant());
  CHECK(v.describe() == "sin(2pi<(1,0,0),u>)*[1*e4]");

  std::mt19937_64 rng(1);
  const auto w = random_trig(rng, 4, 8, 5, 3);
  const std::vector<double> p{0.13, 0.42, 0.77, 0.05};
  const auto jac = w.jacobian(p);
  for (int i = 1; i <= 4; ++i) {
    auto hi = p, lo = p;
    hi[i - 1] += 1e-6;
    lo[i - 1] -= 1e-6;
    const auto d = w.derivative(i, p);
    for (int l = 0; l < 8; ++l) {
      CHECK(d[l] == doctest::Approx((w.value(hi)[l] - w.value(lo)[l]) / 2e-6).epsilon(1e-6));
      CHECK(jac[i - 1][l] == doctest::Approx(d[l]).epsilon(1e-14));
    }
  }
  const auto w3 = w.scaled(3.0);
  CHECK(w3.value(p)[2] == doctest::Approx(3.0 * w.value(p)[2]));
}

TEST_CASE("trig field shape errors") {
  TrigField v(3, 7);
  CHECK_THROWS_AS(v.add_mode({1, 0}, Phase::Cos, zeros<double>(7)), ShapeError);
  CHECK_THROWS_AS(v.add_mode({1, 0, 0}, Phase::Cos, zeros<double>(6)), ShapeError);
  CHECK_THROWS_AS(v.value({0.0, 0.0}), ShapeError);
  CHECK_THROWS_AS(v.derivative(4, {0.0, 0.0, 0.0}), ShapeError);
}

TEST_CASE("grid layout") {
  const TorusGrid g(3, 5);
  CHECK(g.size() == 125);
  CHECK(g.point(0) == std::vector<double>{0.0, 0.0, 0.0});
  CHECK(g.point(1) == std::vector<double>{0.0, 0.0, 0.2});
  CHECK(g.point(25) == std::vector<double>{0.2, 0.0, 0.0});
  CHECK_THROWS_AS(TorusGrid(3, 0), GridError);
}

TEST_CASE("trapezoid rule is exact for band-limited integrands") {
  // cos^2(2 pi 3 u) has frequency 6: exact once N >= 7
  CHECK(integrate(TorusGrid(1, 7), [](const std::vector<double>& u) {
          return std::pow(std::cos(2 * kPi * 3 * u[0]), 2);
        }) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(integrate(TorusGrid(2, 5), [](const std::vector<double>& u) {
          return std::sin(2 * kPi * (u[0] - 2 * u[1]));
        }) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  // under-resolved: aliasing is visible
  CHECK(integrate(TorusGrid(1, 6), [](const std::vector<double>& u) {
          return std::pow(std::cos(2 * kPi * 3 * u[0]), 2);
        }) == doctest::Approx(1.0));

  std::mt19937_64 rng(2);
  const auto w = random_trig(rng, 3, 6, 5, 3);
  auto energy = [&](int n) {
    return integrate(TorusGrid(3, n), [&](const std::vector<double>& u) {
      const auto v = w.value(u);
      return dot(v, v);
    });
  };
  const double coarse = energy(7), fine = energy(14);
  CHECK(std::abs(coarse - fine) <= 1e-12 * std::max(1.0, fine));
  CHECK(coarse == doctest::Approx(energy(31)).epsilon(1e-12));
}

TEST_CASE("pairwise summation and parallel map are deterministic") {
  std::vector<double> x(10001);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 1.0 / static_cast<double>(i + 1);
  const double a = pairwise_sum(x), b = pairwise_sum(x);
  CHECK(a == b);
  double naive = 0.0;
  for (double v : x) naive += v;
  CHECK(a == doctest::Approx(naive).epsilon(1e-14));
  const auto sq = parallel_map(100, [](std::size_t i) { return static_cast<int>(i * i); });
  for (std::size_t i = 0; i < sq.size(); ++i) CHECK(sq[i] == static_cast<int>(i * i));
  CHECK(derive_seed(5, 0) != derive_seed(5, 1));
  CHECK(derive_seed(5, 3) == derive_seed(5, 3));
}

TEST_CASE("exterior derivative on the torus examples") {
  // local coordinates u_1..u_4 on span(e_4..e_7): u_1 = x_4
  FormField a(4, 2);
  a.add_mode({1, 0, 0, 0}, Phase::Sin, parse_form<double>("+x12", 4));
  CHECK(a.d().modes().empty());

  FormField b(4, 2);
  b.add_mode({1, 0, 0, 0}, Phase::Sin, parse_form<double>("+x34", 4));
  const auto db = b.d();
  REQUIRE(db.modes().size() == 1);
  CHECK(db.modes()[0].phase == Phase::Cos);
  CHECK(db.modes()[0].coeff.coeff(mask_of({1, 3, 4})) == doctest::Approx(2 * kPi));
  const std::vector<double> u{0.3, 0.1, 0.2, 0.9};
  CHECK(db.value(u).coeff(mask_of({1, 3, 4})) == doctest::Approx(2 * kPi * std::cos(2 * kPi * 0.3)));

  FormField top(3, 3);
  CHECK_THROWS_AS(top.d(), ShapeError);
}

TEST_CASE("d o d = 0 and d agrees with numerical differentiation") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = 3 + trial % 2;
    for (int p = 0; p + 2 <= k; ++p) {
      const auto f = random_form_field(rng, k, p, 4, 3);
      const auto dd = f.d().d();
      std::vector<double> u(static_cast<std::size_t>(k));
      for (auto& x : u) x = std::uniform_real_distribution<double>(0, 1)(rng);
      CHECK(max_coeff(dd.value(u)) <= 1e-10);
    }
  }
  // 0-forms: df(e_i) = partial_i f
  const auto f = random_form_field(rng, 3, 0, 3, 2);
  const std::vector<double> u{0.21, 0.64, 0.08};
  const auto df = f.d().value(u);
  for (int i = 1; i <= 3; ++i) {
    auto hi = u, lo = u;
    hi[i - 1] += 1e-6;
    lo[i - 1] -= 1e-6;
    const double num = (f.value(hi).coeff(0) - f.value(lo).coeff(0)) / 2e-6;
    CHECK(df.coeff(mask_of({i})) == doctest::Approx(num).epsilon(1e-6));
  }
}

TEST_CASE("form field hodge, laplacian, arithmetic") {
  std::mt19937_64 rng(4);
  const auto f = random_form_field(rng, 4, 2, 3, 2);
  const std::vector<double> u{0.5, 0.25, 0.125, 0.0625};
  CHECK(max_coeff(f.hodge().hodge().value(u) - f.value(u)) <= 1e-14);
  CHECK(max_coeff((f - f).value(u)) <= 1e-14);
  CHECK(max_coeff((f + f).value(u) - f.scaled(2.0).value(u)) <= 1e-14);
  // 0-form Laplacian: -sum_i d_i^2 via d and the codifferential -*d*
  const auto g = random_form_field(rng, 3, 0, 3, 2);
  const auto lap = g.d().hodge().d().hodge().scaled(-1.0);
  const std::vector<double> u3{0.3, 0.6, 0.9};
  CHECK(max_coeff(lap.value(u3) - g.laplacian().value(u3)) <= 1e-10);
}
