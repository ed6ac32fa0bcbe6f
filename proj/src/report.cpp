#include "hlcalib/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "json.hpp"

#include "hlcalib/g2.hpp"
#include "hlcalib/parallel.hpp"
#include "hlcalib/spin7.hpp"
#include "hlcalib/version.hpp"

namespace hlcalib {

namespace {

using json = nlohmann::ordered_json;

constexpr double kFloatIdentityTolerance = 1e-12;

KForm<Rational> configured_phi(const RunConfig& config) {
  if (config.phi.empty()) return standard_phi<Rational>();
  return parse_form<Rational>(config.phi, 7);
}

template <class S>
class IdentityRunner {
  using T = ScalarTraits<S>;

 public:
  IdentityRunner(const RunConfig& config, const KForm<S>& phi)
      : config_(config), g2_(phi), spin7_(spin7_from_g2(phi)) {}

  std::vector<SuiteResult> run() {
    std::vector<SuiteResult> out;
    out.push_back(suite("hl_associative", 0, config_.tuples, [&](auto& r) {
      const auto x = vec(7), y = vec(7), z = vec(7);
      record(r, g2_.associative_residual(x, y, z), sq(x) * sq(y) * sq(z));
    }));
    out.push_back(suite("hl_coassociative", 1, config_.tuples, [&](auto& r) {
      const auto x = vec(7), y = vec(7), z = vec(7), w = vec(7);
      record(r, g2_.coassociative_residual(x, y, z, w), sq(x) * sq(y) * sq(z) * sq(w));
    }));
    out.push_back(suite("hl_cayley", 2, config_.tuples, [&](auto& r) {
      const auto x = vec(8), y = vec(8), z = vec(8), w = vec(8);
      record(r, spin7_.cayley_residual(x, y, z, w), sq(x) * sq(y) * sq(z) * sq(w));
    }));
    out.push_back(suite("alternation", 3, config_.tuples, [&](auto& r) {
      const auto x = vec(7), y = vec(7), z = vec(7), w = vec(7);
      const double s3 = nrm(x) * nrm(y) * nrm(z), s4 = s3 * nrm(w);
      const S p = g2_.phi_of(x, y, z);
      record(r, S(p + g2_.phi_of(y, x, z)), s3);
      record(r, S(p + g2_.phi_of(x, z, y)), s3);
      record(r, g2_.phi_of(x, x, z), s3);
      const S q = g2_.star_phi_of(x, y, z, w);
      record(r, S(q + g2_.star_phi_of(x, y, w, z)), s4);
      record(r, S(q + g2_.star_phi_of(w, y, z, x)), s4);
      const auto a = vec(8), b = vec(8), c = vec(8), d = vec(8);
      const double t4 = nrm(a) * nrm(b) * nrm(c) * nrm(d);
      const S c4 = spin7_.cayley_of(a, b, c, d);
      record(r, S(c4 + spin7_.cayley_of(b, a, c, d)), t4);
      record(r, S(c4 + spin7_.cayley_of(a, b, d, c)), t4);
      record(r, spin7_.cayley_of(a, b, a, d), t4);
    }));
    out.push_back(suite("orthogonality", 4, config_.tuples, [&](auto& r) {
      const auto x = vec(7), y = vec(7), z = vec(7);
      const auto xy = g2_.cross(x, y);
      record(r, dot(xy, x), sq(x) * nrm(y));
      record(r, dot(xy, y), nrm(x) * sq(y));
      const S gram = S(dot(x, x) * dot(y, y) - dot(x, y) * dot(x, y));
      record(r, S(dot(xy, xy) - gram), sq(x) * sq(y));
      const auto c = g2_.chi(x, y, z);
      const double s3 = nrm(x) * nrm(y) * nrm(z);
      for (const auto* v : {&x, &y, &z}) record(r, dot(c, *v), s3 * nrm(*v));
      const auto a = vec(8), b = vec(8), d = vec(8);
      const auto p = spin7_.triple_cross(a, b, d);
      const double t3 = nrm(a) * nrm(b) * nrm(d);
      for (const auto* v : {&a, &b, &d}) record(r, dot(p, *v), t3 * nrm(*v));
    }));
    out.push_back(projector_suite());
    return out;
  }

 private:
  template <class Fn>
  SuiteResult suite(const char* name, std::uint64_t stream, long count, Fn&& body) {
    rng_.seed(derive_seed(config_.seed, stream));
    SuiteResult r;
    r.name = name;
    r.count = count;
    r.tolerance = T::exact ? 0.0 : kFloatIdentityTolerance;
    for (long i = 0; i < count; ++i) body(r);
    r.pass = r.max_residual <= r.tolerance;
    return r;
  }

  // P^2 = P, P = P^T, tr P = 7, and pi7 fixes e_a x e_b for random a, b.
  SuiteResult projector_suite() {
    rng_.seed(derive_seed(config_.seed, 5));
    SuiteResult r;
    r.name = "projector";
    r.tolerance = T::exact ? 0.0 : kFloatIdentityTolerance;
    const Vec<S>& p = spin7_.pi7_matrix();
    S trace = T::from_int(0);
    for (int i = 0; i < kPairs8; ++i) {
      trace += p[i * kPairs8 + i];
      for (int j = 0; j < kPairs8; ++j) {
        S sq_ij = T::from_int(0);
        for (int l = 0; l < kPairs8; ++l) sq_ij += p[i * kPairs8 + l] * p[l * kPairs8 + j];
        record(r, S(sq_ij - p[i * kPairs8 + j]), 1.0);
        record(r, S(p[i * kPairs8 + j] - p[j * kPairs8 + i]), 1.0);
      }
    }
    record(r, S(trace - T::from_int(7)), 1.0);
    r.count = 1;
    const long fixed = std::max(1L, static_cast<long>(config_.tuples) / 10);
    for (long i = 0; i < fixed; ++i) {
      const auto a = vec(8), b = vec(8);
      const auto c = spin7_.cross2(a, b);
      const auto pc = spin7_.pi7(c);
      for (int l = 0; l < kPairs8; ++l) record(r, S(pc[l] - c[l]), nrm(a) * nrm(b));
    }
    r.count += fixed;
    r.pass = r.max_residual <= r.tolerance;
    return r;
  }

  Vec<S> vec(int n) {
    std::uniform_int_distribution<long> d(-9, 9);
    Vec<S> v(static_cast<std::size_t>(n));
    for (auto& x : v) x = T::from_int(d(rng_));
    return v;
  }

  static double sq(const Vec<S>& v) { return T::to_double(dot(v, v)); }
  static double nrm(const Vec<S>& v) { return std::sqrt(sq(v)); }

  static void record(SuiteResult& r, const S& value, double scale) {
    double a = std::abs(T::to_double(value));
    if (!T::exact && scale > 0.0) a /= scale;
    r.max_residual = std::max(r.max_residual, a);
  }

  const RunConfig& config_;
  G2Structure<S> g2_;
  Spin7Structure<S> spin7_;
  std::mt19937_64 rng_;
};

double order_between(double e0, double e1, double h0, double h1) { return std::log(e0 / e1) / std::log(h0 / h1); }

std::string num(double x) {
  if (std::isnan(x)) return "";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json frame_json(const Frame<double>& f) {
  json rows = json::array();
  for (const auto& v : f.vectors) rows.push_back(v);
  return rows;
}

json config_json(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["seed"] = c.seed;
  j["samples"] = c.samples;
  j["tuples"] = c.tuples;
  j["restarts"] = c.restarts;
  j["grid"] = c.grid;
  j["fd_step"] = c.fd_step;
  j["tolerance"] = c.tolerance;
  j["scalar_mode"] = to_string(c.scalar_mode);
  j["phi"] = c.phi.empty() ? format_form(standard_phi<Rational>()) : c.phi;
  j["json"] = c.json_path;
  j["csv"] = c.csv_path;
  j["plot"] = c.plot_path;
  j["config"] = c.config_path;
  return j;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace

std::string to_string(ScalarMode mode) { return mode == ScalarMode::Exact ? "exact" : "float"; }

IdentityReport run_identities(const RunConfig& config) {
  IdentityReport rep;
  rep.mode = config.scalar_mode;
  const KForm<Rational> phi = configured_phi(config);
  if (config.scalar_mode == ScalarMode::Exact)
    rep.suites = IdentityRunner<Rational>(config, phi).run();
  else
    rep.suites = IdentityRunner<double>(config, form_cast<double>(phi)).run();
  rep.pass = true;
  for (const auto& s : rep.suites) {
    rep.pass = rep.pass && s.pass;
    if (s.name.rfind("hl_", 0) == 0) rep.max_residual = std::max(rep.max_residual, s.max_residual);
  }
  return rep;
}

ComassSummary run_comass(const RunConfig& config) {
  const KForm<double> phi = form_cast<double>(configured_phi(config));
  const G2Structure<double> g2(phi);
  const Spin7Structure<double> spin7(spin7_from_g2(phi));
  struct Target {
    const char* id;
    KForm<double> form;
  };
  const Target targets[] = {{"phi", phi}, {"star_phi", g2.star_phi()}, {"cayley", spin7.cayley()}};
  ComassSummary out;
  out.pass = true;
  for (std::uint64_t i = 0; i < 3; ++i) {
    ComassOptions opt;
    opt.restarts = config.restarts;
    opt.seed = derive_seed(config.seed, 100 + i);
    ComassEntry e;
    e.estimate = comass_estimate(targets[i].form, targets[i].form.degree(), opt, targets[i].id);
    const auto& v = e.estimate.best_frame.vectors;
    Vec<double> res;
    if (i == 0)
      res = g2.chi(v[0], v[1], v[2]);
    else if (i == 1)
      res = g2.tau7(v[0], v[1], v[2], v[3]);
    else
      res = spin7.tau8(v[0], v[1], v[2], v[3]);
    e.argmax_residual = std::sqrt(dot(res, res));
    const double c = e.estimate.best_value;
    e.pass = c >= 1.0 - 1e-6 && c <= 1.0 + 1e-9 && e.argmax_residual <= 1e-6;
    out.pass = out.pass && e.pass;
    out.entries.push_back(std::move(e));
  }
  return out;
}

ConvergenceSeries convergence_series(ModelKind kind, const std::vector<double>& steps) {
  const FlatModel m = make_model(kind);
  const NormalField v = canonical_field(m);
  const double exact = second_variation_formula(m, v);
  ConvergenceSeries s;
  s.kind = kind;
  s.h = steps;
  for (double h : steps) {
    s.error.push_back(std::abs(second_variation_fd(m, v, h).value - exact));
    s.raw_error.push_back(std::abs(second_difference(m, v, fd_time_step(v, h)) - exact));
  }
  s.order = s.raw_order = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
    s.order = std::min(s.order, order_between(s.error[i], s.error[i + 1], steps[i], steps[i + 1]));
    s.raw_order = std::min(s.raw_order, order_between(s.raw_error[i], s.raw_error[i + 1], steps[i], steps[i + 1]));
  }
  return s;
}

VariationSummary run_variation(const RunConfig& config) {
  VariationSummary out;
  out.pass = true;
  for (std::size_t ki = 0; ki < std::size(kAllKinds); ++ki) {
    const ModelKind kind = kAllKinds[ki];
    const FlatModel m = make_model(kind);
    const std::uint64_t kind_seed = derive_seed(config.seed, 1000 + ki);
    for (int i = -1; i < config.samples; ++i) {
      const NormalField v = i < 0 ? canonical_field(m) : random_normal_field(m, derive_seed(kind_seed, i));
      VariationRow row;
      row.report = compare(m, v, config.fd_step, config.grid, config.tolerance);
      row.report.field_id = i < 0 ? "canonical" : "random-" + std::to_string(i);
      row.cartan_max = kind == ModelKind::Associative
                           ? cartan_check(m, v, config.fd_step, config.grid).max_discrepancy
                           : std::numeric_limits<double>::quiet_NaN();
      const DefectRate rate = generic_defect_rate(m, v, config.fd_step, config.grid);
      row.weak_identity_gap = std::abs(rate.rate_integral - rate.fd) / std::abs(rate.fd);
      row.jacobi_residual = jacobi_residual(m, v, config.grid);
      row.pass = row.report.pass && (std::isnan(row.cartan_max) || row.cartan_max <= kCartanTolerance) &&
                 row.weak_identity_gap <= kWeakIdentityTolerance && row.jacobi_residual <= kJacobiTolerance;
      out.pass = out.pass && row.pass;
      out.rows.push_back(std::move(row));
    }
    out.convergence.push_back(convergence_series(kind));
    out.pass = out.pass && out.convergence.back().order >= kOrderThreshold;
  }
  return out;
}

RunReport run(const RunConfig& config) {
  const std::string& c = config.command;
  if (c != "identities" && c != "comass" && c != "variation" && c != "all")
    throw std::invalid_argument("unknown command: " + c);
  RunReport r;
  r.config = config;
  r.pass = true;
  if (c == "identities" || c == "all") {
    r.identities = run_identities(config);
    r.pass = r.pass && r.identities->pass;
  }
  if (c == "comass" || c == "all") {
    r.comass = run_comass(config);
    r.pass = r.pass && r.comass->pass;
  }
  if (c == "variation" || c == "all") {
    r.variation = run_variation(config);
    r.pass = r.pass && r.variation->pass;
  }
  return r;
}

std::string to_json(const RunReport& report, const std::string& timestamp) {
  json j;
  j["version"] = version();
  j["timestamp"] = timestamp;
  j["config"] = config_json(report.config);

  if (report.identities) {
    const auto& id = *report.identities;
    json suites = json::array();
    for (const auto& s : id.suites)
      suites.push_back({{"name", s.name},
                        {"count", s.count},
                        {"max_residual", s.max_residual},
                        {"tolerance", s.tolerance},
                        {"pass", s.pass}});
    j["identities"] = {{"mode", to_string(id.mode)},
                       {"max_residual", id.max_residual},
                       {"suites", suites},
                       {"pass", id.pass}};
  } else {
    j["identities"] = nullptr;
  }

  if (report.comass) {
    json entries = json::array();
    for (const auto& e : report.comass->entries)
      entries.push_back({{"form", e.estimate.form_id},
                         {"k", e.estimate.k},
                         {"n", e.estimate.n},
                         {"comass", e.estimate.best_value},
                         {"argmax_residual", e.argmax_residual},
                         {"best_restart", e.estimate.best_restart},
                         {"restarts", e.estimate.restarts},
                         {"iterations", e.estimate.iterations},
                         {"seed", e.estimate.seed},
                         {"hit_iteration_cap", e.estimate.hit_iteration_cap},
                         {"best_frame", frame_json(e.estimate.best_frame)},
                         {"pass", e.pass}});
    j["comass"] = {{"entries", entries}, {"pass", report.comass->pass}};
  } else {
    j["comass"] = nullptr;
  }

  if (report.variation) {
    json rows = json::array();
    for (const auto& row : report.variation->rows) {
      const auto& r = row.report;
      rows.push_back({{"kind", to_string(r.kind)},
                      {"field_id", r.field_id},
                      {"field", r.field},
                      {"fd_value", r.fd_value},
                      {"fd_error_estimate", r.fd_error_estimate},
                      {"formula_value", r.formula_value},
                      {"ratio", r.ratio},
                      {"mclean_ratio", r.mclean_ratio},
                      {"grid", r.grid},
                      {"fd_step", r.fd_step},
                      {"tolerance", r.tolerance},
                      {"cartan_max", row.cartan_max},
                      {"weak_identity_gap", row.weak_identity_gap},
                      {"jacobi_residual", row.jacobi_residual},
                      {"pass", row.pass}});
    }
    j["variation"] = rows;
    json conv = json::array();
    for (const auto& s : report.variation->convergence)
      conv.push_back({{"kind", to_string(s.kind)},
                      {"h", s.h},
                      {"error", s.error},
                      {"raw_error", s.raw_error},
                      {"order", s.order},
                      {"raw_order", s.raw_order}});
    j["convergence"] = conv;
  } else {
    j["variation"] = nullptr;
  }

  j["pass"] = report.pass;
  return j.dump(2) + "\n";
}

std::string to_csv(const VariationSummary& summary) {
  std::string out = "kind,field_id,fd,formula,ratio,mclean_ratio,cartan_max,weak_identity_gap,jacobi_residual,pass\n";
  for (const auto& row : summary.rows) {
    const auto& r = row.report;
    out += to_string(r.kind) + "," + r.field_id + "," + num(r.fd_value) + "," + num(r.formula_value) + "," +
           num(r.ratio) + "," + num(r.mclean_ratio) + "," + num(row.cartan_max) + "," +
           num(row.weak_identity_gap) + "," + num(row.jacobi_residual) + "," + (row.pass ? "true" : "false") + "\n";
  }
  return out;
}

std::string convergence_svg(const VariationSummary& summary) {
  constexpr double W = 640, H = 480, L = 80, R = 170, Tm = 40, B = 60;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};

  double hmin = 1e300, hmax = 0, emin = 1e300, emax = 0;
  for (const auto& s : summary.convergence)
    for (std::size_t i = 0; i < s.h.size(); ++i) {
      hmin = std::min(hmin, s.h[i]);
      hmax = std::max(hmax, s.h[i]);
      for (double e : {s.error[i], s.raw_error[i]})
        if (e > 0) {
          emin = std::min(emin, e);
          emax = std::max(emax, e);
        }
    }
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << "|FD - formula| against h (canonical fields)</text>\n";
  if (hmax <= 0 || emax <= 0) {
    o << "<text x=\"" << W / 2 << "\" y=\"" << H / 2 << "\" text-anchor=\"middle\">no data</text>\n</svg>\n";
    return o.str();
  }
  const double x0 = std::floor(std::log10(hmin)), x1 = std::ceil(std::log10(hmax));
  const double y0 = std::floor(std::log10(emin)), y1 = std::ceil(std::log10(emax));
  auto px = [&](double h) { return L + (std::log10(h) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double e) { return H - B - (std::log10(e) - y0) / (y1 - y0) * (H - Tm - B); };

  o << "<rect x=\"" << L << "\" y=\"" << Tm << "\" width=\"" << W - L - R << "\" height=\"" << H - Tm - B
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double d = x0; d <= x1; d += 1)
    o << "<line x1=\"" << px(std::pow(10, d)) << "\" y1=\"" << H - B << "\" x2=\"" << px(std::pow(10, d))
      << "\" y2=\"" << Tm << "\" stroke=\"#ddd\"/>\n<text x=\"" << px(std::pow(10, d)) << "\" y=\"" << H - B + 18
      << "\" text-anchor=\"middle\">1e" << d << "</text>\n";
  for (double d = y0; d <= y1; d += 1)
    o << "<line x1=\"" << L << "\" y1=\"" << py(std::pow(10, d)) << "\" x2=\"" << W - R << "\" y2=\""
      << py(std::pow(10, d)) << "\" stroke=\"#ddd\"/>\n<text x=\"" << L - 6 << "\" y=\"" << py(std::pow(10, d)) + 4
      << "\" text-anchor=\"end\">1e" << d << "</text>\n";
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\">nominal step h</text>\n";
  o << "<text transform=\"translate(20," << (Tm + H - B) / 2
    << ") rotate(-90)\" text-anchor=\"middle\">absolute error</text>\n";

  auto polyline = [&](const std::vector<double>& h, const std::vector<double>& e, const char* color, bool dashed) {
    o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
      << (dashed ? " stroke-dasharray=\"5,4\"" : "") << " points=\"";
    for (std::size_t i = 0; i < h.size(); ++i)
      if (e[i] > 0) o << px(h[i]) << "," << py(e[i]) << " ";
    o << "\"/>\n";
    for (std::size_t i = 0; i < h.size(); ++i)
      if (e[i] > 0) o << "<circle cx=\"" << px(h[i]) << "\" cy=\"" << py(e[i]) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
  };
  for (std::size_t k = 0; k < summary.convergence.size(); ++k) {
    const auto& s = summary.convergence[k];
    const char* c = colors[k % 4];
    polyline(s.h, s.error, c, false);
    polyline(s.h, s.raw_error, c, true);
    const double ly = Tm + 16 + 34 * static_cast<double>(k);
    char orders[64];
    std::snprintf(orders, sizeof orders, "order %.2f / raw %.2f", s.order, s.raw_order);
    o << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 36 << "\" y2=\"" << ly
      << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n<text x=\"" << W - R + 42 << "\" y=\"" << ly + 4 << "\">"
      << to_string(s.kind) << "</text>\n<text x=\"" << W - R + 42 << "\" y=\"" << ly + 18
      << "\" font-size=\"10\">" << orders << "</text>\n";
  }
  const double ly = Tm + 16 + 34 * static_cast<double>(summary.convergence.size());
  o << "<line x1=\"" << W - R + 12 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 36 << "\" y2=\"" << ly
    << "\" stroke=\"black\" stroke-dasharray=\"5,4\"/>\n<text x=\"" << W - R + 42 << "\" y=\"" << ly + 4
    << "\">raw 3-point</text>\n";
  o << "</svg>\n";
  return o.str();
}

void write_outputs(const RunReport& report, const std::string& timestamp) {
  const auto& c = report.config;
  if (!c.json_path.empty()) write_file(c.json_path, to_json(report, timestamp));
  if (report.variation) {
    if (!c.csv_path.empty()) write_file(c.csv_path, to_csv(*report.variation));
    if (!c.plot_path.empty()) write_file(c.plot_path, convergence_svg(*report.variation));
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace hlcalib
