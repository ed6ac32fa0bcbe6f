#pragma once

// Grassmannian sampling and comass estimation for constant-coefficient forms.

#include <cstdint>
#include <stdexcept>
#include <string>

#include "hlcalib/exterior.hpp"

namespace hlcalib {

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ComassReport {
  std::string form_id;
  int k = 0;
  int n = 0;
  double best_value = 0.0;
  Frame<double> best_frame;
  int best_restart = -1;
  int restarts = 0;
  int iterations = 0;
  std::uint64_t seed = 0;
  // Largest value seen at any accepted iterate of any restart.
  double max_iterate_value = 0.0;
  // True when the winning restart was still improving at the iteration cap.
  bool hit_iteration_cap = false;
};

struct ComassOptions {
  int restarts = 100;
  int iterations = 500;
  double step = 0.1;
  std::uint64_t seed = 0;
};

/// Modified Gram-Schmidt on the rows; throws on (numerically) dependent input.
Frame<double> orthonormalize(const Frame<double>& f);

/// Uniform random oriented k-plane: Gram-Schmidt of a Gaussian k x n sample.
Frame<double> sample_plane(int k, int n, std::uint64_t seed);

/// Slot-wise gradient: row j holds w with <w, e_l> = form(f_1, .., e_l (slot j), .., f_k).
Frame<double> eval_gradient(const KForm<double>& form, const Frame<double>& f);

ComassReport comass_estimate(const KForm<double>& form, int k, const ComassOptions& options = {},
                             std::string form_id = {});

/// 1 - form(f) for an orthonormal frame f.
double calibrated_defect(const KForm<double>& form, const Frame<double>& f, double tol = 1e-9);

/// max |form(v, f_{i_1}, .., f_{i_{k-1}})|: the restriction of v -| form to span(f).
double normal_contraction_check(const KForm<double>& form, const Frame<double>& f, const Vec<double>& v,
                                double tol = 1e-9);

}  // namespace hlcalib
