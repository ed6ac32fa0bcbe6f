#include <random>

#include "doctest.h"
#include "hlcalib/exterior.hpp"
#include "hlcalib/g2.hpp"
#include "test_support.hpp"

using namespace hlcalib;
using hlcalib::testing::random_form;
using hlcalib::testing::random_vec;
using Q = Rational;

namespace {
KForm<Q> lit(const char* s, int n) { return parse_form<Q>(s, n); }
}  // namespace

TEST_CASE("wedge examples") {
  CHECK(wedge(lit("+x1", 4), lit("+x2", 4)) == lit("+x12", 4));
  CHECK(wedge(lit("+x12", 4), lit("+x12", 4)).is_zero());
  const auto s = lit("+x12 +x34", 4);
  CHECK(wedge(s, s) == lit("+2x1234", 4));
  CHECK(wedge(lit("+x2", 3), lit("+x1", 3)) == lit("-x12", 3));
}

TEST_CASE("wedge errors") {
  CHECK_THROWS_AS(wedge(lit("+x12", 4), lit("+x12", 5)), ShapeError);
  CHECK_THROWS_AS(wedge(lit("+x123", 4), lit("+x12", 4)), ShapeError);
}

TEST_CASE("hodge examples") {
  CHECK(hodge(lit("+x123", 7)) == lit("+x4567", 7));
  CHECK(hodge(KForm<Q>::unit(7, 0)) == lit("+x1234567", 7));
  CHECK(hodge(KForm<Q>::unit(7, 0), -1) == lit("-x1234567", 7));
  CHECK(hodge(standard_phi<Q>()) == standard_star_phi<Q>());
  CHECK_THROWS_AS(hodge(lit("+x1", 3), 0), ShapeError);
}

TEST_CASE("eval examples") {
  const auto phi = standard_phi<Q>();
  CHECK(eval(phi, Frame<Q>::coordinate(7, {1, 2, 3})) == 1);
  CHECK(eval(phi, Frame<Q>::coordinate(7, {1, 2, 4})) == 0);
  CHECK(eval(standard_star_phi<Q>(), Frame<Q>::coordinate(7, {4, 5, 6, 7})) == 1);
  CHECK_THROWS_AS(eval(phi, Frame<Q>::coordinate(7, {1, 2})), ShapeError);
}

TEST_CASE("interior examples") {
  CHECK(interior(basis_vector<Q>(3, 1), lit("+x123", 3)) == lit("+x23", 3));
  CHECK(interior(basis_vector<Q>(4, 4), lit("+x123", 4)).is_zero());
  CHECK(interior(basis_vector<Q>(6, 4), lit("+x14 +x25 +x36", 6)) == lit("-x1", 6));
  CHECK_THROWS_AS(interior(basis_vector<Q>(5, 1), lit("+x12", 4)), ShapeError);
}

TEST_CASE("inner examples") {
  CHECK(inner(lit("+x12", 4), lit("+x12", 4)) == 1);
  CHECK(inner(lit("+x12", 4), lit("+x13", 4)) == 0);
  CHECK(inner(standard_phi<Q>(), standard_phi<Q>()) == 7);
  CHECK_THROWS_AS(inner(lit("+x12", 4), lit("+x123", 4)), ShapeError);
}

TEST_CASE("frame_to_kvector examples") {
  CHECK(frame_to_kvector(Frame<Q>::coordinate(7, {1, 2, 3})) == lit("+x123", 7));
  Frame<Q> f(3, {{1, 1, 0}, {0, 1, 0}});
  CHECK(frame_to_kvector(f) == lit("+x12", 3));

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 3 + trial % 6;
    const int k = 1 + trial % n;
    std::vector<Vec<Q>> vs;
    for (int i = 0; i < k; ++i) vs.push_back(random_vec<Q>(rng, n));
    const Frame<Q> fr(n, vs);
    CHECK(norm2(frame_to_kvector(fr)) == hlcalib::testing::gram_oracle(vs));
  }
}

TEST_CASE("determinant agrees with Leibniz oracle up to 6x6") {
  std::mt19937_64 rng(5);
  for (int size = 0; size <= 6; ++size)
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::vector<Q>> rows;
      std::vector<Q> flat_rows;
      for (int r = 0; r < size; ++r) {
        rows.push_back(random_vec<Q>(rng, size));
        flat_rows.insert(flat_rows.end(), rows.back().begin(), rows.back().end());
      }
      CHECK(determinant(flat_rows, size) == hlcalib::testing::leibniz_det(rows));
    }
}

TEST_CASE("hodge is an involution up to sign") {
  std::mt19937_64 rng(1);
  for (int n = 1; n <= 8; ++n)
    for (int k = 0; k <= n; ++k)
      for (int orient : {1, -1}) {
        const auto a = random_form<Q>(rng, n, k);
        const int sign = ((k * (n - k)) % 2 == 0) ? 1 : -1;
        CHECK(hodge(hodge(a, orient), orient) == Q(sign) * a);
      }
}

TEST_CASE("eval equals pairing with the Plucker k-vector") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + trial % 7;
    const int k = 1 + (trial / 7) % n;
    const auto a = random_form<Q>(rng, n, k);
    std::vector<Vec<Q>> vs;
    for (int i = 0; i < k; ++i) vs.push_back(random_vec<Q>(rng, n));
    const Frame<Q> f(n, vs);
    CHECK(eval(a, f) == inner(a, frame_to_kvector(f)));
  }
}

TEST_CASE("wedge is associative and graded commutative on 10^4 random inputs") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pick(0, 3);
  int checked = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 4 + trial % 5;
    const int p = pick(rng) % 3, q = pick(rng) % 3, r = pick(rng) % 2;
    if (p + q + r > n) continue;
    const auto a = random_form<Q>(rng, n, p, -2, 2);
    const auto b = random_form<Q>(rng, n, q, -2, 2);
    const auto c = random_form<Q>(rng, n, r, -2, 2);
    CHECK(wedge(wedge(a, b), c) == wedge(a, wedge(b, c)));
    const int sign = ((p * q) % 2 == 0) ? 1 : -1;
    CHECK(wedge(a, b) == Q(sign) * wedge(b, a));
    ++checked;
  }
  CHECK(checked > 9000);
}

TEST_CASE("interior is the adjoint of left wedge") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 3 + trial % 6;
    const int k = 1 + trial % n;
    const auto a = random_form<Q>(rng, n, k);
    const auto b = random_form<Q>(rng, n, k - 1);
    const auto v = random_vec<Q>(rng, n, -4, 4);
    CHECK(inner(interior(v, a), b) == inner(a, wedge(flat(v), b)));
    if (k >= 2) CHECK(interior(v, interior(v, a)).is_zero());
  }
}

TEST_CASE("form literal parsing") {
  const auto f = parse_form<Q>("+x1234 -x2345", 8);
  CHECK(f.degree() == 4);
  CHECK(f.coeff(mask_of({1, 2, 3, 4})) == 1);
  CHECK(f.coeff(mask_of({2, 3, 4, 5})) == -1);
  CHECK(parse_form<Q>("+x21", 3) == parse_form<Q>("-x12", 3));
  CHECK(parse_form<Q>("+1/2x12 -3x34", 4).coeff(mask_of({1, 2})) == Q(1, 2));
  CHECK(format_form(parse_form<Q>("-x356 +x123 +3/2x145", 7)) == "+x123 +3/2x145 -x356");
  CHECK(parse_form<Q>(format_form(standard_phi<Q>()), 7) == standard_phi<Q>());
  CHECK_THROWS_AS(parse_form<Q>("", 7), ParseError);
  CHECK_THROWS_AS(parse_form<Q>("+x123 x145", 7), ParseError);
  CHECK_THROWS_AS(parse_form<Q>("+x128", 7), ParseError);
  CHECK_THROWS_AS(parse_form<Q>("+x12 +x123", 7), ParseError);
  CHECK_THROWS_AS(parse_form<Q>("+y12", 7), ParseError);
}

TEST_CASE("float backend agrees with the exact backend") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_form<Q>(rng, 7, 3);
    std::vector<Vec<Q>> vs;
    for (int i = 0; i < 3; ++i) vs.push_back(random_vec<Q>(rng, 7));
    const Frame<Q> fq(7, vs);
    Frame<double> fd;
    fd.n = 7;
    for (const auto& v : vs) fd.vectors.push_back(to_double_vec(v));
    CHECK(eval(form_cast<double>(a), fd) == doctest::Approx(eval(a, fq).get_d()));
  }
}

TEST_CASE("restrict_to re-indexes onto the subspace") {
  const auto phi = standard_phi<Q>();
  const std::vector<int> l{4, 5, 6, 7};
  const auto alpha = restrict_to(interior(basis_vector<Q>(7, 1), phi), l);
  CHECK(alpha == lit("+x12 -x34", 4));
  const std::vector<int> rev{2, 1};
  CHECK(restrict_to(lit("+x12", 3), rev) == lit("-x12", 2));
}

TEST_CASE("shape validation") {
  CHECK_THROWS_AS(KForm<Q>(9, 1), ShapeError);
  CHECK_THROWS_AS(KForm<Q>(3, 4), ShapeError);
  KForm<Q> f(3, 2);
  CHECK_THROWS_AS(f.add(mask_of({1}), Q(1)), ShapeError);
  CHECK_THROWS_AS(f.add(mask_of({1, 4}), Q(1)), ShapeError);
  CHECK_THROWS_AS(Frame<Q>(3, {{1, 0}}), ShapeError);
  CHECK(Frame<Q>::coordinate(4, {1, 3}).is_orthonormal());
  CHECK_FALSE(Frame<Q>(2, {{1, 1}, {0, 1}}).is_orthonormal());
}
