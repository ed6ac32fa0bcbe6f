#pragma once

// The standard Spin(7) package on R^8: Cayley 4-form, triple cross product P,
// the Lambda^2_7 projection pi7, the 2-fold cross product with values in
// 2-forms, the companion form tau, and the Cayley Harvey-Lawson residual.
//
// 2-forms on R^8 have two representations: KForm (used by the closed-form
// route pi7(beta) = (beta - *(beta ^ Phi)) / 4) and a dense 28-vector in
// lexicographic pair order (used by the cached-matrix route).

#include <array>
#include <utility>
#include <vector>

#include "hlcalib/exterior.hpp"
#include "hlcalib/g2.hpp"

namespace hlcalib {

inline constexpr int kPairs8 = 28;

/// Position of dx^{ij} (1 <= i < j <= n) in lexicographic pair order.
inline int pair_index(int i, int j, int n = 8) {
  if (i > j) std::swap(i, j);
  if (i < 1 || j > n || i == j) throw ShapeError("pair_index: invalid pair");
  // pairs starting with a < i: sum_{a=1}^{i-1} (n - a)
  return (i - 1) * n - (i - 1) * i / 2 + (j - i - 1);
}

inline std::pair<int, int> pair_at(int index, int n = 8) {
  for (int i = 1; i < n; ++i) {
    const int row = n - i;
    if (index < row) return {i, i + 1 + index};
    index -= row;
  }
  throw ShapeError("pair_at: index out of range");
}

template <class S>
Vec<S> to_dense2(const KForm<S>& beta) {
  if (beta.degree() != 2) throw ShapeError("to_dense2: expected a 2-form");
  const int n = beta.dim();
  Vec<S> out = zeros<S>(n * (n - 1) / 2);
  for (const auto& [m, c] : beta.terms()) {
    const auto idx = indices_of(m);
    out[pair_index(idx[0], idx[1], n)] = c;
  }
  return out;
}

template <class S>
KForm<S> from_dense2(const Vec<S>& beta, int n = 8) {
  KForm<S> out(n, 2);
  for (int p = 0; p < static_cast<int>(beta.size()); ++p) {
    const auto [i, j] = pair_at(p, n);
    out.add(mask_of({i, j}), beta[p]);
  }
  return out;
}

/// v^flat ^ w^flat as a dense 2-form.
template <class S>
Vec<S> wedge_vectors(const Vec<S>& v, const Vec<S>& w) {
  const int n = static_cast<int>(v.size());
  Vec<S> out = zeros<S>(n * (n - 1) / 2);
  int p = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++p) out[p] = v[i] * w[j] - v[j] * w[i];
  return out;
}

template <class S>
KForm<S> standard_cayley() {
  return parse_form<S>(
      "+x1234 +x1256 -x1278 +x1357 +x1368 +x1458 -x1467 "
      "-x2358 +x2367 +x2457 +x2468 -x3456 +x3478 +x5678",
      8);
}

/// dtheta ^ phi + *phi on R^8 = R_theta + R^7, theta in slot 1.
template <class S>
KForm<S> spin7_from_g2(const KForm<S>& phi) {
  if (phi.dim() != 7 || phi.degree() != 3) throw ShapeError("spin7_from_g2: expected a 3-form on R^7");
  const auto dtheta = KForm<S>::unit(8, mask_of({1}));
  return wedge(dtheta, embed(phi, 8, 1)) + embed(hodge(phi, 1), 8, 1);
}

template <class S>
class Spin7Structure {
 public:
  struct SparseEntry {
    int row;
    int col;
    S value;
  };

  explicit Spin7Structure(KForm<S> cayley = standard_cayley<S>(), int orientation = 1)
      : cayley_(std::move(cayley)), orientation_(orientation), tensor_(expand_alternating(cayley_)) {
    if (cayley_.dim() != 8 || cayley_.degree() != 4)
      throw ShapeError("Spin7Structure: expected a 4-form on R^8");
    const S quarter = ScalarTraits<S>::from_ratio(1, 4);
    pi7_matrix_.assign(kPairs8 * kPairs8, ScalarTraits<S>::from_int(0));
    for (int col = 0; col < kPairs8; ++col) {
      const auto [i, j] = pair_at(col);
      const auto image = hodge(wedge(KForm<S>::unit(8, mask_of({i, j})), cayley_), orientation_);
      for (const auto& [m, c] : image.terms()) {
        const auto idx = indices_of(m);
        const int row = pair_index(idx[0], idx[1]);
        star_wedge_.push_back({row, col, c});
        pi7_matrix_[row * kPairs8 + col] -= quarter * c;
      }
      pi7_matrix_[col * kPairs8 + col] += quarter;
    }
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j)
        cross2_table_[i][j] = cross2(basis_vector<S>(8, i + 1), basis_vector<S>(8, j + 1));
  }

  const KForm<S>& cayley() const { return cayley_; }
  int orientation() const { return orientation_; }

  /// Row-major 28 x 28 matrix of pi7 on dense 2-forms.
  const Vec<S>& pi7_matrix() const { return pi7_matrix_; }
  /// Nonzeros of beta -> *(beta ^ Phi).
  const std::vector<SparseEntry>& star_wedge_entries() const { return star_wedge_; }
  const Vec<S>& cross2_table(int i, int j) const { return cross2_table_.at(i - 1).at(j - 1); }

  S cayley_of(const Vec<S>& x, const Vec<S>& y, const Vec<S>& z, const Vec<S>& w) const {
    return dot(x, triple_cross(y, z, w));
  }

  /// <x, P(y, z, w)> = Phi(x, y, z, w).
  Vec<S> triple_cross(const Vec<S>& y, const Vec<S>& z, const Vec<S>& w) const {
    Vec<S> out = contract_leading(tensor_, 8, {&y, &z, &w});
    for (auto& v : out) v = -v;
    return out;
  }

  /// *(beta ^ Phi) on a dense 2-form.
  Vec<S> star_wedge(const Vec<S>& beta) const {
    Vec<S> out = zeros<S>(kPairs8);
    for (const auto& e : star_wedge_)
      if (!ScalarTraits<S>::is_zero(beta[e.col])) out[e.row] += e.value * beta[e.col];
    return out;
  }

  /// Closed form (beta - *(beta ^ Phi)) / 4.
  KForm<S> pi7(const KForm<S>& beta) const {
    if (beta.dim() != 8 || beta.degree() != 2) throw ShapeError("pi7: expected a 2-form on R^8");
    KForm<S> out = beta - hodge(wedge(beta, cayley_), orientation_);
    out *= ScalarTraits<S>::from_ratio(1, 4);
    return out;
  }

  /// Cached-matrix route.
  Vec<S> pi7(const Vec<S>& beta) const {
    Vec<S> out = zeros<S>(kPairs8);
    for (int r = 0; r < kPairs8; ++r)
      for (int c = 0; c < kPairs8; ++c) {
        const S& m = pi7_matrix_[r * kPairs8 + c];
        if (!ScalarTraits<S>::is_zero(m) && !ScalarTraits<S>::is_zero(beta[c])) out[r] += m * beta[c];
      }
    return out;
  }

  /// v x w = 2 pi7(v^flat ^ w^flat) = (beta - *(beta ^ Phi)) / 2.
  Vec<S> cross2(const Vec<S>& v, const Vec<S>& w) const {
    const Vec<S> beta = wedge_vectors(v, w);
    const Vec<S> sw = star_wedge(beta);
    const S half = ScalarTraits<S>::from_ratio(1, 2);
    Vec<S> out(kPairs8);
    for (int p = 0; p < kPairs8; ++p) out[p] = half * (beta[p] - sw[p]);
    return out;
  }

  /// -a x P(b,c,d) + <a,b>(c x d) + <a,c>(d x b) + <a,d>(b x c)
  Vec<S> tau8(const Vec<S>& a, const Vec<S>& b, const Vec<S>& c, const Vec<S>& d) const {
    Vec<S> out = cross2(a, triple_cross(b, c, d));
    for (auto& v : out) v = -v;
    const std::array<std::pair<S, Vec<S>>, 3> terms = {{
        {dot(a, b), cross2(c, d)},
        {dot(a, c), cross2(d, b)},
        {dot(a, d), cross2(b, c)},
    }};
    for (const auto& [s, form] : terms) {
      if (ScalarTraits<S>::is_zero(s)) continue;
      for (int p = 0; p < kPairs8; ++p) out[p] += s * form[p];
    }
    return out;
  }

  /// Phi(x,y,z,w)^2 + |tau(x,y,z,w)|^2 - |x^y^z^w|^2
  S cayley_residual(const Vec<S>& x, const Vec<S>& y, const Vec<S>& z, const Vec<S>& w) const {
    const S p = cayley_of(x, y, z, w);
    const Vec<S> t = tau8(x, y, z, w);
    return S(p * p + dot(t, t) - gram_determinant(Frame<S>(8, {x, y, z, w})));
  }

 private:
  KForm<S> cayley_;
  int orientation_;
  std::vector<AlternatingEntry<S>> tensor_;
  std::vector<SparseEntry> star_wedge_;
  Vec<S> pi7_matrix_;
  std::array<std::array<Vec<S>, 8>, 8> cross2_table_;
};

}  // namespace hlcalib
