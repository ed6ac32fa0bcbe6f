#include "hlcalib/calibration.hpp"

#include <cmath>
#include <bit>
#include <random>

#include "hlcalib/parallel.hpp"

namespace hlcalib {

namespace {

using Tensor = std::vector<AlternatingEntry<double>>;

Frame<double> gradient(const Tensor& tensor, const Frame<double>& f) {
  const int k = f.size();
  Frame<double> g(f.n, std::vector<Vec<double>>(static_cast<std::size_t>(k), zeros<double>(f.n)));
  for (const auto& e : tensor)
    for (int j = 0; j < k; ++j) {
      double prod = e.coeff;
      for (int s = 0; s < k && prod != 0.0; ++s)
        if (s != j) prod *= f.vectors[s][e.index[s]];
      g.vectors[j][e.index[j]] += prod;
    }
  return g;
}

// Norm of the gradient component normal to the plane: sum_j |g_j - value f_j|^2.
double normal_gradient2(const Frame<double>& g, const Frame<double>& f, double value) {
  double acc = 0.0;
  for (int j = 0; j < f.size(); ++j)
    for (int l = 0; l < f.n; ++l) {
      const double d = g.vectors[j][l] - value * f.vectors[j][l];
      acc += d * d;
    }
  return acc;
}

Frame<double> step_frame(const Frame<double>& f, const Frame<double>& g, double step) {
  Frame<double> trial = f;
  for (int j = 0; j < f.size(); ++j)
    for (int l = 0; l < f.n; ++l) trial.vectors[j][l] += step * g.vectors[j][l];
  return orthonormalize(trial);
}

struct RestartResult {
  double value = -2.0;
  double max_value = -2.0;
  Frame<double> frame;
  bool capped = false;
};

RestartResult ascend(const KForm<double>& form, const Tensor& tensor, int k, const ComassOptions& opt,
                     std::uint64_t seed) {
  RestartResult r;
  r.frame = sample_plane(k, form.dim(), seed);
  r.value = eval(form, r.frame);
  r.max_value = r.value;
  double step = opt.step;
  int it = 0;
  for (; it < opt.iterations; ++it) {
    const Frame<double> g = gradient(tensor, r.frame);
    Frame<double> trial = step_frame(r.frame, g, step);
    const double v = eval(form, trial);
    if (v > r.value) {
      r.frame = std::move(trial);
      r.value = v;
      r.max_value = std::max(r.max_value, v);
    } else {
      step *= 0.5;
      if (step < 1e-14) break;
    }
  }
  r.capped = (it == opt.iterations);
  // Once the value stalls in floating point, keep stepping while the normal
  // gradient still shrinks: this pins the plane, not just the value.
  Frame<double> g = gradient(tensor, r.frame);
  double res = normal_gradient2(g, r.frame, r.value);
  for (int p = 0; p < 100 && res > 0.0; ++p) {
    Frame<double> trial = step_frame(r.frame, g, opt.step);
    const double v = eval(form, trial);
    Frame<double> tg = gradient(tensor, trial);
    const double tres = normal_gradient2(tg, trial, v);
    if (!(tres < res) || v < r.value - 1e-15) break;
    r.frame = std::move(trial);
    r.value = v;
    r.max_value = std::max(r.max_value, v);
    g = std::move(tg);
    res = tres;
  }
  return r;
}

}  // namespace

Frame<double> orthonormalize(const Frame<double>& f) {
  Frame<double> out = f;
  for (int i = 0; i < out.size(); ++i) {
    auto& v = out.vectors[i];
    for (int j = 0; j < i; ++j) {
      const double c = dot(v, out.vectors[j]);
      for (int l = 0; l < out.n; ++l) v[l] -= c * out.vectors[j][l];
    }
    const double len = std::sqrt(dot(v, v));
    if (!(len > 1e-12)) throw PreconditionError("orthonormalize: vectors are linearly dependent");
    for (auto& x : v) x /= len;
  }
  return out;
}

Frame<double> sample_plane(int k, int n, std::uint64_t seed) {
  if (n < 1 || n > kMaxDim || k < 1 || k > n) throw ShapeError("sample_plane: need 1 <= k <= n <= 8");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (;;) {
    Frame<double> f(n, std::vector<Vec<double>>(static_cast<std::size_t>(k), zeros<double>(n)));
    for (auto& v : f.vectors)
      for (auto& x : v) x = gauss(rng);
    try {
      return orthonormalize(f);
    } catch (const PreconditionError&) {
      // measure-zero event; draw again from the same stream
    }
  }
}

Frame<double> eval_gradient(const KForm<double>& form, const Frame<double>& f) {
  if (f.size() != form.degree()) throw ShapeError("eval_gradient: frame size must equal form degree");
  if (f.n != form.dim()) throw ShapeError("eval_gradient: dimension mismatch");
  return gradient(expand_alternating(form), f);
}

ComassReport comass_estimate(const KForm<double>& form, int k, const ComassOptions& options, std::string form_id) {
  if (form.degree() != k) throw ShapeError("comass_estimate: form degree differs from k");
  if (k < 1) throw ShapeError("comass_estimate: k must be positive");
  if (options.restarts < 1 || options.iterations < 0 || !(options.step > 0.0))
    throw std::invalid_argument("comass_estimate: invalid options");
  const Tensor tensor = expand_alternating(form);
  const auto results = parallel_map(static_cast<std::size_t>(options.restarts), [&](std::size_t r) {
    return ascend(form, tensor, k, options, derive_seed(options.seed, r));
  });

  ComassReport rep;
  rep.form_id = std::move(form_id);
  rep.k = k;
  rep.n = form.dim();
  rep.restarts = options.restarts;
  rep.iterations = options.iterations;
  rep.seed = options.seed;
  rep.best_value = -2.0;
  rep.max_iterate_value = -2.0;
  for (std::size_t r = 0; r < results.size(); ++r) {
    rep.max_iterate_value = std::max(rep.max_iterate_value, results[r].max_value);
    if (results[r].value > rep.best_value) {
      rep.best_value = results[r].value;
      rep.best_frame = results[r].frame;
      rep.best_restart = static_cast<int>(r);
      rep.hit_iteration_cap = results[r].capped;
    }
  }
  return rep;
}

double calibrated_defect(const KForm<double>& form, const Frame<double>& f, double tol) {
  if (f.size() != form.degree() || f.n != form.dim()) throw ShapeError("calibrated_defect: shape mismatch");
  if (!f.is_orthonormal(tol)) throw PreconditionError("calibrated_defect: frame is not orthonormal");
  return 1.0 - eval(form, f);
}

double normal_contraction_check(const KForm<double>& form, const Frame<double>& f, const Vec<double>& v,
                                double tol) {
  if (static_cast<int>(v.size()) != form.dim()) throw ShapeError("normal_contraction_check: vector length");
  if (std::abs(calibrated_defect(form, f, tol)) > tol)
    throw PreconditionError("normal_contraction_check: frame is not calibrated");
  const double vlen = std::sqrt(dot(v, v));
  for (const auto& w : f.vectors)
    if (std::abs(dot(v, w)) > tol * std::max(1.0, vlen))
      throw PreconditionError("normal_contraction_check: v is not normal to the plane");
  const KForm<double> c = interior(v, form);
  const int k = f.size();
  double worst = 0.0;
  // each (k-1)-subset of the frame, in increasing order
  for (unsigned m = 0; m < (1u << k); ++m) {
    if (std::popcount(m) != k - 1) continue;
    std::vector<Vec<double>> sub;
    for (int i = 0; i < k; ++i)
      if (m & (1u << i)) sub.push_back(f.vectors[i]);
    worst = std::max(worst, std::abs(eval(c, Frame<double>(f.n, sub))));
  }
  return worst;
}

}  // namespace hlcalib
