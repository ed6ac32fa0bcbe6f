#pragma once

// Constant-coefficient exterior algebra on R^n, n <= 8.
//
// Multi-indices are 8-bit masks: bit (i-1) set <=> index i present. A k-form
// stores only its nonzero coefficients; k-vectors share the representation
// through the Euclidean metric. Every Hodge star takes the orientation
// explicitly (+1 = e_1 ^ ... ^ e_n).

#include <algorithm>
#include <array>
#include <cctype>
#include <bit>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hlcalib/scalar.hpp"

namespace hlcalib {

using Mask = std::uint8_t;

inline constexpr int kMaxDim = 8;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline int degree_of(Mask m) { return std::popcount(static_cast<unsigned>(m)); }

inline Mask full_mask(int n) { return static_cast<Mask>((1u << n) - 1u); }

inline Mask mask_of(std::span<const int> indices) {
  unsigned m = 0;
  for (int i : indices) {
    if (i < 1 || i > kMaxDim) throw ShapeError("index out of range 1..8");
    const unsigned bit = 1u << (i - 1);
    if (m & bit) throw ShapeError("repeated index in multi-index");
    m |= bit;
  }
  return static_cast<Mask>(m);
}

inline Mask mask_of(std::initializer_list<int> indices) {
  return mask_of(std::span<const int>(indices.begin(), indices.size()));
}

/// 1-based indices of the set bits, increasing.
inline std::vector<int> indices_of(Mask m) {
  std::vector<int> out;
  for (int i = 0; i < kMaxDim; ++i)
    if (m & (1u << i)) out.push_back(i + 1);
  return out;
}

/// Sign of the shuffle that sorts the concatenation (a, b) of two disjoint
/// increasing multi-indices.
inline int shuffle_sign(Mask a, Mask b) {
  int inversions = 0;
  for (int j = 0; j < kMaxDim; ++j) {
    if (!(b & (1u << j))) continue;
    const unsigned above = static_cast<unsigned>(a) & ~((2u << j) - 1u);
    inversions += std::popcount(above);
  }
  return (inversions % 2 == 0) ? 1 : -1;
}

/// Sign of an arbitrary permutation of distinct integers (by inversion count).
inline int permutation_sign(std::span<const int> seq) {
  int inversions = 0;
  for (std::size_t i = 0; i < seq.size(); ++i)
    for (std::size_t j = i + 1; j < seq.size(); ++j)
      if (seq[i] > seq[j]) ++inversions;
  return (inversions % 2 == 0) ? 1 : -1;
}

template <class S>
class KForm {
 public:
  using Terms = std::map<Mask, S>;

  KForm(int n, int k) : n_(n), k_(k) {
    if (n < 1 || n > kMaxDim) throw ShapeError("ambient dimension must be in 1..8");
    if (k < 0 || k > n) throw ShapeError("degree must be in 0..n");
  }

  static KForm unit(int n, Mask m, S coeff = ScalarTraits<S>::from_int(1)) {
    KForm f(n, degree_of(m));
    f.add(m, std::move(coeff));
    return f;
  }

  int dim() const { return n_; }
  int degree() const { return k_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  S coeff(Mask m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? ScalarTraits<S>::from_int(0) : it->second;
  }

  /// Adds c to the coefficient of the basis element m; zero results are dropped.
  KForm& add(Mask m, const S& c) {
    if (degree_of(m) != k_ || (m & ~full_mask(n_)))
      throw ShapeError("multi-index incompatible with form shape");
    if (ScalarTraits<S>::is_zero(c)) return *this;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (ScalarTraits<S>::is_zero(it->second)) terms_.erase(it);
    }
    return *this;
  }

  KForm& operator+=(const KForm& o) {
    require_same_shape(o);
    for (const auto& [m, c] : o.terms_) add(m, c);
    return *this;
  }
  KForm& operator-=(const KForm& o) {
    require_same_shape(o);
    for (const auto& [m, c] : o.terms_) add(m, S(-c));
    return *this;
  }
  KForm& operator*=(const S& s) {
    if (ScalarTraits<S>::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend KForm operator+(KForm a, const KForm& b) { return a += b; }
  friend KForm operator-(KForm a, const KForm& b) { return a -= b; }
  friend KForm operator*(const S& s, KForm a) { return a *= s; }
  friend KForm operator-(KForm a) { return a *= ScalarTraits<S>::from_int(-1); }

  friend bool operator==(const KForm& a, const KForm& b) {
    return a.n_ == b.n_ && a.k_ == b.k_ && a.terms_ == b.terms_;
  }

 private:
  void require_same_shape(const KForm& o) const {
    if (o.n_ != n_ || o.k_ != k_) throw ShapeError("form shape mismatch");
  }

  int n_;
  int k_;
  Terms terms_;
};

template <class S>
using KVector = KForm<S>;

/// Ordered k-tuple of vectors in R^n.
template <class S>
struct Frame {
  int n = 0;
  std::vector<Vec<S>> vectors;

  Frame() = default;
  Frame(int dim, std::vector<Vec<S>> vs) : n(dim), vectors(std::move(vs)) {
    for (const auto& v : vectors)
      if (static_cast<int>(v.size()) != n) throw ShapeError("frame vector has wrong length");
  }

  int size() const { return static_cast<int>(vectors.size()); }

  /// Pairwise inner products equal delta_ij (within tol; exactly for rationals).
  bool is_orthonormal(double tol = 1e-12) const {
    for (int i = 0; i < size(); ++i)
      for (int j = i; j < size(); ++j) {
        const double g = ScalarTraits<S>::to_double(dot(vectors[i], vectors[j]));
        const double want = (i == j) ? 1.0 : 0.0;
        if (ScalarTraits<S>::exact ? g != want : std::abs(g - want) > tol) return false;
      }
    return true;
  }

  static Frame coordinate(int dim, std::initializer_list<int> indices) {
    Frame f;
    f.n = dim;
    for (int i : indices) f.vectors.push_back(basis_vector<S>(dim, i));
    return f;
  }
};

namespace detail {

// Closed forms for size <= 4 on a row-major array with row stride `size`.
template <class S>
S small_determinant(const S* a, int size) {
  using T = ScalarTraits<S>;
  auto at = [&](int r, int c) -> const S& { return a[r * size + c]; };
  switch (size) {
    case 0:
      return T::from_int(1);
    case 1:
      return at(0, 0);
    case 2:
      return S(at(0, 0) * at(1, 1) - at(0, 1) * at(1, 0));
    case 3:
      return S(at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
               at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
               at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0)));
    default: {
      // Laplace expansion along the first two rows.
      static constexpr int pairs[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
      static constexpr int signs[6] = {1, -1, 1, 1, -1, 1};
      S acc = T::from_int(0);
      for (int p = 0; p < 6; ++p) {
        const int c0 = pairs[p][0], c1 = pairs[p][1];
        const int d0 = pairs[5 - p][0], d1 = pairs[5 - p][1];
        S top = at(0, c0) * at(1, c1) - at(0, c1) * at(1, c0);
        S bottom = at(2, d0) * at(3, d1) - at(2, d1) * at(3, d0);
        if (signs[p] > 0)
          acc += top * bottom;
        else
          acc -= top * bottom;
      }
      return acc;
    }
  }
}

}  // namespace detail

/// Determinant of a small dense matrix (row-major, size x size).
template <class S>
S determinant(std::vector<S> a, int size) {
  using T = ScalarTraits<S>;
  if (size <= 4) return detail::small_determinant(a.data(), size);
  auto at = [&](int r, int c) -> S& { return a[static_cast<std::size_t>(r * size + c)]; };
  // Gaussian elimination; pivot on largest magnitude (exact on first nonzero).
  S det = T::from_int(1);
  for (int c = 0; c < size; ++c) {
    int piv = -1;
    double best = -1.0;
    for (int r = c; r < size; ++r) {
      if (T::is_zero(at(r, c))) continue;
      const double mag = std::abs(T::to_double(at(r, c)));
      if (piv < 0 || (!T::exact && mag > best)) {
        piv = r;
        best = mag;
        if (T::exact) break;
      }
    }
    if (piv < 0) return T::from_int(0);
    if (piv != c) {
      for (int j = 0; j < size; ++j) std::swap(at(c, j), at(piv, j));
      det = -det;
    }
    det *= at(c, c);
    for (int r = c + 1; r < size; ++r) {
      if (T::is_zero(at(r, c))) continue;
      S f = at(r, c) / at(c, c);
      for (int j = c; j < size; ++j) at(r, j) -= f * at(c, j);
    }
  }
  return det;
}

/// Determinant of the k x k minor of a frame on the rows of multi-index m.
template <class S>
S frame_minor(const Frame<S>& f, Mask m) {
  const int k = f.size();
  int idx[kMaxDim];
  int count = 0;
  for (int i = 0; i < kMaxDim; ++i)
    if (m & (1u << i)) idx[count++] = i;
  if (k <= 4) {
    std::array<S, 16> a;
    for (int r = 0; r < k; ++r)
      for (int c = 0; c < k; ++c) a[r * k + c] = f.vectors[r][static_cast<std::size_t>(idx[c])];
    return detail::small_determinant(a.data(), k);
  }
  std::vector<S> a;
  a.reserve(static_cast<std::size_t>(k * k));
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) a.push_back(f.vectors[r][static_cast<std::size_t>(idx[c])]);
  return determinant(std::move(a), k);
}

template <class S>
KForm<S> wedge(const KForm<S>& a, const KForm<S>& b) {
  if (a.dim() != b.dim()) throw ShapeError("wedge: dimension mismatch");
  if (a.degree() + b.degree() > a.dim()) throw ShapeError("wedge: degree overflow");
  KForm<S> out(a.dim(), a.degree() + b.degree());
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) {
      if (ma & mb) continue;
      S c = ca * cb;
      if (shuffle_sign(ma, mb) < 0) c = -c;
      out.add(static_cast<Mask>(ma | mb), c);
    }
  return out;
}

/// Hodge star for the Euclidean metric: e_I ^ *e_I = orientation * e_1...n.
template <class S>
KForm<S> hodge(const KForm<S>& a, int orientation = 1) {
  if (orientation != 1 && orientation != -1) throw ShapeError("orientation must be +1 or -1");
  const int n = a.dim();
  const Mask all = full_mask(n);
  KForm<S> out(n, n - a.degree());
  for (const auto& [m, c] : a.terms()) {
    const Mask comp = static_cast<Mask>(all & ~m);
    S v = c;
    if (shuffle_sign(m, comp) * orientation < 0) v = -v;
    out.add(comp, v);
  }
  return out;
}

/// Multilinear evaluation a(f_1, ..., f_k).
template <class S>
S eval(const KForm<S>& a, const Frame<S>& f) {
  if (a.degree() != f.size() || a.dim() != f.n) throw ShapeError("eval: shape mismatch");
  S acc = ScalarTraits<S>::from_int(0);
  for (const auto& [m, c] : a.terms()) acc += c * frame_minor(f, m);
  return acc;
}

template <class S>
S eval(const KForm<S>& a, std::initializer_list<Vec<S>> vectors) {
  return eval(a, Frame<S>(a.dim(), std::vector<Vec<S>>(vectors)));
}

/// Contraction of v into the first slot.
template <class S>
KForm<S> interior(const Vec<S>& v, const KForm<S>& a) {
  if (static_cast<int>(v.size()) != a.dim()) throw ShapeError("interior: dimension mismatch");
  if (a.degree() == 0) throw ShapeError("interior: cannot contract a 0-form");
  KForm<S> out(a.dim(), a.degree() - 1);
  for (const auto& [m, c] : a.terms()) {
    int pos = 0;
    for (int i = 0; i < a.dim(); ++i) {
      const unsigned bit = 1u << i;
      if (!(m & bit)) continue;
      if (!ScalarTraits<S>::is_zero(v[static_cast<std::size_t>(i)])) {
        S term = c * v[static_cast<std::size_t>(i)];
        if (pos % 2 == 1) term = -term;
        out.add(static_cast<Mask>(m & ~bit), term);
      }
      ++pos;
    }
  }
  return out;
}

template <class S>
S inner(const KForm<S>& a, const KForm<S>& b) {
  if (a.dim() != b.dim() || a.degree() != b.degree()) throw ShapeError("inner: shape mismatch");
  S acc = ScalarTraits<S>::from_int(0);
  for (const auto& [m, c] : a.terms()) {
    auto it = b.terms().find(m);
    if (it != b.terms().end()) acc += c * it->second;
  }
  return acc;
}

template <class S>
S norm2(const KForm<S>& a) {
  return inner(a, a);
}

/// Plucker coordinates of f_1 ^ ... ^ f_k.
template <class S>
KVector<S> frame_to_kvector(const Frame<S>& f) {
  KVector<S> out(f.n, f.size());
  const Mask all = full_mask(f.n);
  for (unsigned m = 0; m <= all; ++m) {
    if (degree_of(static_cast<Mask>(m)) != f.size()) continue;
    out.add(static_cast<Mask>(m), frame_minor(f, static_cast<Mask>(m)));
  }
  return out;
}

template <class S>
S gram_determinant(const Frame<S>& f) {
  const int k = f.size();
  std::vector<S> g;
  g.reserve(static_cast<std::size_t>(k * k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) g.push_back(dot(f.vectors[i], f.vectors[j]));
  return determinant(std::move(g), k);
}

/// The 1-form v^flat.
template <class S>
KForm<S> flat(const Vec<S>& v) {
  const int n = static_cast<int>(v.size());
  KForm<S> out(n, 1);
  for (int i = 0; i < n; ++i) out.add(static_cast<Mask>(1u << i), v[static_cast<std::size_t>(i)]);
  return out;
}

/// Re-embeds a form on R^m into R^n (n >= m + offset), shifting index i to i + offset.
template <class S>
KForm<S> embed(const KForm<S>& a, int n, int offset) {
  if (a.dim() + offset > n || offset < 0) throw ShapeError("embed: target too small");
  KForm<S> out(n, a.degree());
  for (const auto& [m, c] : a.terms()) out.add(static_cast<Mask>(m << offset), c);
  return out;
}

/// Pullback to the coordinate subspace spanned by `indices` (in the given
/// order), expressed in that subspace's own coordinates 1..indices.size().
template <class S>
KForm<S> restrict_to(const KForm<S>& a, std::span<const int> indices) {
  const int m = static_cast<int>(indices.size());
  if (a.degree() > m) return KForm<S>(std::max(m, 1), 0);  // unreachable for valid use
  KForm<S> out(m, a.degree());
  const Mask sub = mask_of(indices);
  for (const auto& [mk, c] : a.terms()) {
    if (mk & ~sub) continue;
    std::vector<int> local;
    for (int i : indices_of(mk)) {
      const auto it = std::find(indices.begin(), indices.end(), i);
      local.push_back(static_cast<int>(it - indices.begin()) + 1);
    }
    S v = c;
    if (permutation_sign(local) < 0) v = -v;
    out.add(mask_of(local), v);
  }
  return out;
}

template <class To, class From>
KForm<To> form_cast(const KForm<From>& a) {
  KForm<To> out(a.dim(), a.degree());
  for (const auto& [m, c] : a.terms()) {
    if constexpr (std::is_same_v<To, double> && std::is_same_v<From, Rational>)
      out.add(m, c.get_d());
    else
      out.add(m, To(c));
  }
  return out;
}

/// Parses the literal syntax used in tests and docs, e.g. "+x123 -x145 +1/2x67".
/// Each token is a sign, an optional rational magnitude, 'x', then single-digit
/// indices. The degree is taken from the first token.
template <class S>
KForm<S> parse_form(std::string_view text, int n) {
  std::vector<std::pair<S, std::vector<int>>> parsed;
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n')) ++pos;
  };
  skip_ws();
  if (pos == text.size()) throw ParseError("empty form literal");
  while (pos < text.size()) {
    int sign = 1;
    if (text[pos] == '+' || text[pos] == '-') {
      sign = text[pos] == '-' ? -1 : 1;
      ++pos;
    } else if (!parsed.empty()) {
      throw ParseError("form literal: expected sign at offset " + std::to_string(pos));
    }
    long num = 1, den = 1;
    if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      num = 0;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
        num = num * 10 + (text[pos++] - '0');
      if (pos < text.size() && text[pos] == '/') {
        ++pos;
        den = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
          den = den * 10 + (text[pos++] - '0');
        if (den == 0) throw ParseError("form literal: zero denominator");
      }
    }
    if (pos >= text.size() || (text[pos] != 'x' && text[pos] != 'e'))
      throw ParseError("form literal: expected 'x' at offset " + std::to_string(pos));
    ++pos;
    std::vector<int> idx;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
      idx.push_back(text[pos++] - '0');
    for (int i : idx)
      if (i < 1 || i > n) throw ParseError("form literal: index out of range");
    parsed.emplace_back(ScalarTraits<S>::from_ratio(sign * num, den), std::move(idx));
    skip_ws();
  }
  const int k = static_cast<int>(parsed.front().second.size());
  KForm<S> out(n, k);
  for (auto& [c, idx] : parsed) {
    if (static_cast<int>(idx.size()) != k) throw ParseError("form literal: mixed degrees");
    std::vector<int> sorted = idx;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) continue;  // repeated index: zero
    S v = c;
    if (permutation_sign(idx) < 0) v = -v;
    out.add(mask_of(sorted), v);
  }
  return out;
}

/// Inverse of parse_form; terms in lexicographic multi-index order.
template <class S>
std::string format_form(const KForm<S>& a) {
  std::vector<std::pair<std::vector<int>, S>> rows;
  for (const auto& [m, c] : a.terms()) rows.emplace_back(indices_of(m), c);
  std::sort(rows.begin(), rows.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  if (rows.empty()) return "0";
  std::string out;
  for (const auto& [idx, c] : rows) {
    if (!out.empty()) out += ' ';
    const bool neg = ScalarTraits<S>::to_double(c) < 0;
    out += neg ? '-' : '+';
    S mag = neg ? S(-c) : c;
    if (!(mag == ScalarTraits<S>::from_int(1))) out += ScalarTraits<S>::to_string(mag);
    out += 'x';
    for (int i : idx) out += static_cast<char>('0' + i);
  }
  return out;
}

/// All signed orderings of the terms of a k-form: a(e_{i1},...,e_{ik}) = coeff.
template <class S>
struct AlternatingEntry {
  std::array<std::uint8_t, kMaxDim> index{};  // 0-based
  S coeff;
};

template <class S>
std::vector<AlternatingEntry<S>> expand_alternating(const KForm<S>& a) {
  std::vector<AlternatingEntry<S>> out;
  for (const auto& [m, c] : a.terms()) {
    std::vector<int> idx = indices_of(m);
    do {
      AlternatingEntry<S> e{{}, c};
      for (std::size_t s = 0; s < idx.size(); ++s) e.index[s] = static_cast<std::uint8_t>(idx[s] - 1);
      if (permutation_sign(idx) < 0) e.coeff = -e.coeff;
      out.push_back(std::move(e));
    } while (std::next_permutation(idx.begin(), idx.end()));
  }
  return out;
}

/// Vector w with <w, e_l> = a(args..., e_l): the form contracted on all but its last slot.
template <class S>
Vec<S> contract_leading(const std::vector<AlternatingEntry<S>>& tensor, int n,
                        std::initializer_list<const Vec<S>*> args) {
  Vec<S> out = zeros<S>(n);
  const std::size_t m = args.size();
  for (const auto& e : tensor) {
    S prod = e.coeff;
    std::size_t s = 0;
    bool zero = false;
    for (const Vec<S>* v : args) {
      const S& x = (*v)[e.index[s++]];
      if (ScalarTraits<S>::is_zero(x)) {
        zero = true;
        break;
      }
      prod *= x;
    }
    if (!zero) out[e.index[m]] += prod;
  }
  return out;
}

}  // namespace hlcalib
