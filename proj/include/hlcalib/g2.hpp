#pragma once

// The standard G2 package on R^7: associative 3-form, its dual, the cross
// product, the vector-valued forms chi and tau7, and the Harvey-Lawson
// residuals. G2Structure accepts any 3-form so that the product construction
// from Calabi-Yau data (and deliberately corrupted forms) can be audited with
// the same machinery.

#include <array>
#include <utility>
#include <vector>

#include "hlcalib/exterior.hpp"

namespace hlcalib {

template <class S>
KForm<S> standard_phi() {
  return parse_form<S>("+x123 +x145 -x167 +x246 +x257 +x347 -x356", 7);
}

template <class S>
KForm<S> standard_star_phi() {
  return parse_form<S>("+x4567 +x2367 -x2345 +x1357 +x1346 +x1256 -x1247", 7);
}

/// Flat Calabi-Yau data on C^3 = R^6 with z_j = x_j + i x_{j+3}:
/// omega = dx^14 + dx^25 + dx^36 and Re(dz_1 ^ dz_2 ^ dz_3).
template <class S>
KForm<S> flat_cy_omega() {
  return parse_form<S>("+x14 +x25 +x36", 6);
}

template <class S>
KForm<S> flat_cy_re_omega() {
  return parse_form<S>("+x123 -x156 +x246 -x345", 6);
}

/// dtheta ^ omega + Re Omega on R^7 = R_theta + R^6, theta in slot 1.
template <class S>
KForm<S> g2_from_cy(const KForm<S>& omega, const KForm<S>& re_omega) {
  if (omega.dim() != 6 || omega.degree() != 2) throw ShapeError("g2_from_cy: omega must be a 2-form on R^6");
  if (re_omega.dim() != 6 || re_omega.degree() != 3)
    throw ShapeError("g2_from_cy: Re Omega must be a 3-form on R^6");
  const auto dtheta = KForm<S>::unit(7, mask_of({1}));
  return wedge(dtheta, embed(omega, 7, 1)) + embed(re_omega, 7, 1);
}

template <class S>
class G2Structure {
 public:
  explicit G2Structure(KForm<S> phi = standard_phi<S>(), int orientation = 1)
      : phi_(std::move(phi)),
        star_phi_(hodge(phi_, orientation)),
        phi_tensor_(expand_alternating(phi_)),
        star_phi_tensor_(expand_alternating(star_phi_)) {
    if (phi_.dim() != 7 || phi_.degree() != 3) throw ShapeError("G2Structure: expected a 3-form on R^7");
    for (int i = 0; i < 7; ++i)
      for (int j = 0; j < 7; ++j) {
        const auto ei = basis_vector<S>(7, i + 1), ej = basis_vector<S>(7, j + 1);
        cross_table_[i][j] = contract_leading(phi_tensor_, 7, {&ei, &ej});
      }
  }

  const KForm<S>& phi() const { return phi_; }
  const KForm<S>& star_phi() const { return star_phi_; }

  /// e_i x e_j, 1-based.
  const Vec<S>& cross_table(int i, int j) const { return cross_table_.at(i - 1).at(j - 1); }

  /// <u x v, w> = phi(u, v, w).
  Vec<S> cross(const Vec<S>& u, const Vec<S>& v) const {
    Vec<S> out = zeros<S>(7);
    for (int i = 0; i < 7; ++i) {
      if (ScalarTraits<S>::is_zero(u[i])) continue;
      for (int j = 0; j < 7; ++j) {
        if (i == j || ScalarTraits<S>::is_zero(v[j])) continue;
        const S uv = u[i] * v[j];
        const Vec<S>& e = cross_table_[i][j];
        for (int l = 0; l < 7; ++l)
          if (!ScalarTraits<S>::is_zero(e[l])) out[l] += uv * e[l];
      }
    }
    return out;
  }

  S phi_of(const Vec<S>& x, const Vec<S>& y, const Vec<S>& z) const { return dot(cross(x, y), z); }

  S star_phi_of(const Vec<S>& x, const Vec<S>& y, const Vec<S>& z, const Vec<S>& w) const {
    return dot(chi(x, y, z), w);
  }

  /// <chi(x, y, z), w> = *phi(x, y, z, w).
  Vec<S> chi(const Vec<S>& x, const Vec<S>& y, const Vec<S>& z) const {
    return contract_leading(star_phi_tensor_, 7, {&x, &y, &z});
  }

  /// -(phi(y,z,w) x + phi(z,x,w) y + phi(x,y,w) z + phi(y,x,z) w)
  Vec<S> tau7(const Vec<S>& x, const Vec<S>& y, const Vec<S>& z, const Vec<S>& w) const {
    const S a = phi_of(y, z, w), b = phi_of(z, x, w), c = phi_of(x, y, w), d = phi_of(y, x, z);
    Vec<S> out = zeros<S>(7);
    for (int i = 0; i < 7; ++i) out[i] = -(a * x[i] + b * y[i] + c * z[i] + d * w[i]);
    return out;
  }

  /// phi(x,y,z)^2 + |chi(x,y,z)|^2 - |x^y^z|^2
  S associative_residual(const Vec<S>& x, const Vec<S>& y, const Vec<S>& z) const {
    const S p = phi_of(x, y, z);
    const Vec<S> c = chi(x, y, z);
    return S(p * p + dot(c, c) - gram_determinant(Frame<S>(7, {x, y, z})));
  }

  /// *phi(x,y,z,w)^2 + |tau7(x,y,z,w)|^2 - |x^y^z^w|^2
  S coassociative_residual(const Vec<S>& x, const Vec<S>& y, const Vec<S>& z, const Vec<S>& w) const {
    const S p = star_phi_of(x, y, z, w);
    const Vec<S> t = tau7(x, y, z, w);
    return S(p * p + dot(t, t) - gram_determinant(Frame<S>(7, {x, y, z, w})));
  }

 private:
  KForm<S> phi_;
  KForm<S> star_phi_;
  std::vector<AlternatingEntry<S>> phi_tensor_;
  std::vector<AlternatingEntry<S>> star_phi_tensor_;
  std::array<std::array<Vec<S>, 7>, 7> cross_table_;
};

}  // namespace hlcalib
