#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hlcalib/report.hpp"
#include "hlcalib/version.hpp"

namespace {

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

const char* verdict(bool pass) { return pass ? "PASS" : "FAIL"; }

void print_summary(const hlcalib::RunReport& r) {
  if (r.identities) {
    std::printf("identities (%s)\n", hlcalib::to_string(r.identities->mode).c_str());
    for (const auto& s : r.identities->suites)
      std::printf("  %-18s n=%-6ld max residual %.3g  %s\n", s.name.c_str(), s.count, s.max_residual,
                  verdict(s.pass));
  }
  if (r.comass) {
    std::printf("comass\n");
    for (const auto& e : r.comass->entries)
      std::printf("  %-18s %.12f  argmax residual %.2g  %s\n", e.estimate.form_id.c_str(), e.estimate.best_value,
                  e.argmax_residual, verdict(e.pass));
  }
  if (r.variation) {
    std::printf("variation\n");
    for (hlcalib::ModelKind kind : hlcalib::kAllKinds) {
      int total = 0, passed = 0;
      double lo = INFINITY, hi = -INFINITY, mc = NAN;
      for (const auto& row : r.variation->rows) {
        if (row.report.kind != kind) continue;
        ++total;
        passed += row.pass;
        lo = std::fmin(lo, row.report.ratio);
        hi = std::fmax(hi, row.report.ratio);
        if (row.report.field_id == "canonical") mc = row.report.mclean_ratio;
      }
      std::printf("  %-18s %d/%d rows pass, ratio in [%.8f, %.8f], mclean_ratio(canonical) %.6f\n",
                  hlcalib::to_string(kind).c_str(), passed, total, lo, hi, mc);
    }
    for (const auto& s : r.variation->convergence)
      std::printf("  order %-12s %.3f (raw %.3f)\n", hlcalib::to_string(s.kind).c_str(), s.order, s.raw_order);
  }
  std::printf("overall %s\n", verdict(r.pass));
}

}  // namespace

int main(int argc, char** argv) {
  hlcalib::RunConfig cfg;
  CLI::App app{"Calibration identities, comass estimates and second-variation checks on flat tori"};
  app.set_help_flag("--help", "print help and exit");  // -h would clash with --h
  app.set_version_flag("--version", hlcalib::version());
  app.require_subcommand(1);
  app.add_subcommand("identities", "exact or float identity suites")->fallthrough();
  app.add_subcommand("comass", "comass of phi, *phi and the Cayley form")->fallthrough();
  app.add_subcommand("variation", "finite-difference vs formula second variation")->fallthrough();
  app.add_subcommand("all", "everything above")->fallthrough();

  app.add_option("--seed", cfg.seed, "master seed")->capture_default_str();
  app.add_option("--samples", cfg.samples, "random fields per kind")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--tuples", cfg.tuples, "random tuples per identity suite")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--restarts", cfg.restarts, "comass restarts")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_option("--grid", cfg.grid, "points per circle (0: automatic)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  app.add_option("--h", cfg.fd_step, "nominal finite-difference step")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--tol", cfg.tolerance, "ratio tolerance")->check(CLI::PositiveNumber)->capture_default_str();
  auto* exact = app.add_flag("--exact", "rational arithmetic for identities (default)");
  auto* flt = app.add_flag("--float", "double arithmetic for identities");
  exact->excludes(flt);
  app.add_option("--phi", cfg.phi, "override the G2 3-form, e.g. \"+x123 +x145 ...\"");
  app.add_option("--json", cfg.json_path, "write JSON report");
  app.add_option("--csv", cfg.csv_path, "write per-field CSV");
  app.add_option("--plot", cfg.plot_path, "write convergence SVG");
  app.set_config("--config", "", "key=value file; flags override it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::FileError& e) {
    std::cerr << e.what() << "\n";
    return kExitIo;
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  cfg.scalar_mode = flt->count() > 0 ? hlcalib::ScalarMode::Float : hlcalib::ScalarMode::Exact;
  if (auto* c = app.get_config_ptr(); c && c->count() > 0) cfg.config_path = c->as<std::string>();

  try {
    const hlcalib::RunReport report = hlcalib::run(cfg);
    hlcalib::write_outputs(report, hlcalib::utc_timestamp());
    print_summary(report);
    return report.pass ? 0 : kExitFail;
  } catch (const hlcalib::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
