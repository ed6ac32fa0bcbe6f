#pragma once

// Band-limited fields on the unit coordinate torus T^k = [0,1)^k and the
// uniform-grid trapezoid rule that integrates them exactly.

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlcalib/exterior.hpp"

namespace hlcalib {

class GridError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Phase { Cos, Sin };

/// coeffs * trig(2 pi <freq, u>)
struct TrigMode {
  std::vector<int> freq;
  Phase phase = Phase::Cos;
  Vec<double> coeffs;
};

/// Vector field T^k -> R^n given as a finite trig sum.
class TrigField {
 public:
  TrigField() = default;
  TrigField(int k, int n) : k_(k), n_(n) {}

  int k() const { return k_; }
  int n() const { return n_; }
  const std::vector<TrigMode>& modes() const { return modes_; }

  TrigField& add_mode(std::vector<int> freq, Phase phase, Vec<double> coeffs);

  /// max |freq component| over all modes (0 for constant fields)
  int max_frequency() const;
  bool is_constant() const { return max_frequency() == 0; }

  Vec<double> value(const std::vector<double>& u) const;
  /// d/du_i, i 1-based; exact mode-wise differentiation
  Vec<double> derivative(int i, const std::vector<double>& u) const;
  /// all k partial derivatives at once
  std::vector<Vec<double>> jacobian(const std::vector<double>& u) const;

  TrigField scaled(double c) const;
  std::string describe() const;

 private:
  int k_ = 0;
  int n_ = 0;
  std::vector<TrigMode> modes_;
};

using NormalField = TrigField;

/// trig(2 pi <freq, u>) * coeff, coeff a constant p-form on R^k
struct FormMode {
  std::vector<int> freq;
  Phase phase = Phase::Cos;
  KForm<double> coeff;
};

/// p-form field on T^k with trig-polynomial coefficients.
class FormField {
 public:
  FormField() = default;
  FormField(int k, int degree) : k_(k), degree_(degree) {}

  int k() const { return k_; }
  int degree() const { return degree_; }
  const std::vector<FormMode>& modes() const { return modes_; }

  FormField& add_mode(std::vector<int> freq, Phase phase, KForm<double> coeff);
  int max_frequency() const;

  KForm<double> value(const std::vector<double>& u) const;
  /// exterior derivative, exact per mode
  FormField d() const;
  FormField hodge(int orientation = 1) const;
  /// positive Laplacian -sum_i d_i^2, per mode a factor 4 pi^2 |freq|^2
  FormField laplacian() const;
  FormField scaled(double c) const;
  FormField operator+(const FormField& o) const;
  FormField operator-(const FormField& o) const { return *this + o.scaled(-1.0); }

 private:
  int k_ = 0;
  int degree_ = 0;
  std::vector<FormMode> modes_;
};

/// Uniform N^k grid on [0,1)^k.
struct TorusGrid {
  int k = 0;
  int N = 0;

  TorusGrid(int dim, int points_per_circle);
  long size() const;
  std::vector<double> point(long index) const;
};

/// Trapezoid rule: mean of fn over the grid, pairwise-summed in index order.
/// Grid points are evaluated in parallel slabs.
double integrate(const TorusGrid& grid, const std::function<double(const std::vector<double>&)>& fn);

/// fn evaluated at every grid point, in grid order.
std::vector<double> sample(const TorusGrid& grid, const std::function<double(const std::vector<double>&)>& fn);

}  // namespace hlcalib
