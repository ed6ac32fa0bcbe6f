#pragma once

// Second variation of volume for the four calibrated flat-torus models:
// finite differences of the actual volume against the Dirac-operator
// formulas, plus the Cartan, weak-identity and Jacobi cross-checks.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlcalib/exterior.hpp"
#include "hlcalib/torus.hpp"

namespace hlcalib {

class KindError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ModelKind { Associative, Coassociative, Cayley, SpecialLagrangian };

inline constexpr ModelKind kAllKinds[] = {ModelKind::Associative, ModelKind::Coassociative, ModelKind::Cayley,
                                          ModelKind::SpecialLagrangian};

std::string to_string(ModelKind kind);
ModelKind parse_kind(const std::string& name);

/// Coordinate subtorus L = T^k inside T^n, calibrated by `calibration` with the
/// frame (e_t1, .., e_tk) in the listed order.
struct FlatModel {
  ModelKind kind = ModelKind::Associative;
  int n = 0;
  int k = 0;
  KForm<Rational> calibration_exact{1, 0};
  KForm<double> calibration{1, 0};
  std::vector<int> tangent;  // 1-based ambient indices
  std::vector<int> normal;
  // Orientation of L used by Hodge stars on L. For the coassociative model
  // alpha_V is self-dual only for the reverse of the calibrated orientation.
  int l_orientation = 1;
  // special Lagrangian only
  KForm<double> omega{1, 0};
  KForm<double> re_omega{1, 0};
};

FlatModel make_model(ModelKind kind);

/// Field with coefficients only on the model's normal directions.
NormalField make_normal_field(const FlatModel& model, const std::vector<TrigMode>& modes_over_normals);
bool is_normal(const FlatModel& model, const NormalField& field);

/// sin(2 pi u_1) times the first normal direction.
NormalField canonical_field(const FlatModel& model);
NormalField constant_field(const FlatModel& model, const Vec<double>& over_normals);
/// 1..max_modes modes, nonzero frequency vectors with entries in [-max_freq, max_freq],
/// coefficients uniform in [-1, 1].
NormalField random_normal_field(const FlatModel& model, std::uint64_t seed, int max_freq = 3, int max_modes = 5);

/// max(9, 4F + 1)
int default_grid(int max_frequency);
int default_grid(const NormalField& field);

/// Volume along the straight-line flow u -> u + t V(u) (+ t^2/2 W(u) if accel given).
double volume(const FlatModel& model, const NormalField& field, double t, int grid = 0,
              const TrigField* accel = nullptr);
/// volume - 1, computed without cancellation
double volume_excess(const FlatModel& model, const NormalField& field, double t, int grid = 0,
                     const TrigField* accel = nullptr);

/// sum over modes of 2 pi |freq| |coeffs|: a bound for |dV/du| anywhere.
double gradient_scale(const TrigField& field);
/// Actual t-step for a nominal step h: h / max(1, gradient_scale), so the
/// expansion parameter t |dV| of the volume stays below h.
double fd_time_step(const TrigField& field, double h);

struct FdResult {
  double value = 0.0;
  double truncation_error = 0.0;
  double h = 0.0;       // nominal
  double t_step = 0.0;  // actual
  int grid = 0;
  bool symmetric = true;  // 3-point even stencil; otherwise 5-point
};

/// d^2/dt^2 volume at 0: Richardson over {h, h/2}.
FdResult second_variation_fd(const FlatModel& model, const NormalField& field, double h = 1e-2, int grid = 0);
/// Same, for the flow with normal-plus-tangential acceleration W (not even in t).
FdResult second_variation_fd(const FlatModel& model, const NormalField& field, const TrigField& accel,
                             double h = 1e-2, int grid = 0);
/// Un-extrapolated 3-point value 2 (vol(t) - 1) / t^2 at a literal step t.
double second_difference(const FlatModel& model, const NormalField& field, double t, int grid = 0);

/// Samples on the grid (grid order).
std::vector<Vec<double>> dirac_associative(const FlatModel& model, const NormalField& field, int grid = 0);
/// D V(u) = sum_i e_i x dV/du_i, as a vector in R^7
Vec<double> dirac_associative_at(const FlatModel& model, const NormalField& field, const std::vector<double>& u);
std::vector<Vec<double>> dirac_cayley(const FlatModel& model, const NormalField& field, int grid = 0);
/// dense 2-form on R^8 (lexicographic pairs)
Vec<double> dirac_cayley_at(const FlatModel& model, const NormalField& field, const std::vector<double>& u);

/// Coassociative: (V -| phi)|_L, a 2-form on T^4. Special Lagrangian: (V -| omega)|_L, a 1-form on T^3.
FormField alpha_form(const FlatModel& model, const NormalField& field);
inline FormField d_on_torus(const FormField& f) { return f.d(); }

struct SlPair {
  FormField f;
  FormField alpha;
};
/// (f, alpha) -> (*d*alpha, -df - *d alpha) on T^3
SlPair sl_dirac(const FormField& f, const FormField& alpha, int orientation = 1);

double second_variation_formula(const FlatModel& model, const NormalField& field, int grid = 0);
/// sum_i int |dV/du_i|^2
double jacobi_energy(const FlatModel& model, const NormalField& field, int grid = 0);
double jacobi_residual(const FlatModel& model, const NormalField& field, int grid = 0);

/// Coefficient in front of the Dirac term in McLean's original statement.
double mclean_coefficient(ModelKind kind);

struct VariationReport {
  ModelKind kind = ModelKind::Associative;
  std::string field_id;
  std::string field;
  double fd_value = 0.0;
  double fd_error_estimate = 0.0;
  double formula_value = 0.0;
  double ratio = 0.0;
  double mclean_ratio = 0.0;
  int grid = 0;
  double fd_step = 0.0;
  double tolerance = 0.0;
  double zero_tolerance = 0.0;
  bool pass = false;
};

/// pass iff |ratio - 1| <= tol, or both sides below zero_tol for kernel fields.
VariationReport compare(const FlatModel& model, const NormalField& field, double h = 1e-2, int grid = 0,
                        double tol = 1e-3, double zero_tol = 1e-10);

struct CartanResult {
  double max_discrepancy = 0.0;           // against sign * D V
  double max_discrepancy_opposite = 0.0;  // against -sign * D V
  double max_dirac = 0.0;
  int sign = -1;
};

/// Finite-difference t-derivative of chi(e_1 + t V_1, e_2 + t V_2, e_3 + t V_3)
/// compared with sign * D V at every grid point. With chi defined by
/// <chi(x,y,z), w> = *phi(x,y,z,w) the derivative equals -D V.
CartanResult cartan_check(const FlatModel& model, const NormalField& field, double h = 1e-2, int grid = 0);

struct DefectRate {
  double rate_integral = 0.0;
  double fd = 0.0;
};

/// int (d/dt Psi(xi_t))^2 with Psi^2 = |xi|^2 - cal(xi)^2, extrapolated in h,
/// alongside second_variation_fd.
DefectRate generic_defect_rate(const FlatModel& model, const NormalField& field, double h = 1e-2, int grid = 0);

struct SplittingCheck {
  double max_overlap = 0.0;  // |<e_i x e_a, pi7(beta)>| over tangent i, normal a, beta anti-self-dual on L
  int rank_normal_part = 0;  // rank of {e_i x e_a}
  int rank_lambda_minus = 0;
  int rank_total = 0;
};

/// Lambda^2_7 restricted to the Cayley plane splits as pi7(Lambda^2_- T*L) + E_L.
SplittingCheck cayley_splitting_check(const FlatModel& model);

/// max |*alpha - alpha| over coefficients, for alpha = (e_a -| phi)|_L and all normal a.
double alpha_self_duality_defect(const FlatModel& model, int orientation);

}  // namespace hlcalib
