// Command-line front end. Links only the C interface.

#include <cstdio>
#include <cstdlib>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cknlab/cknlab.h"

namespace {

struct ConfigHandle {
  cknlab_config* p = nullptr;
  ~ConfigHandle() { cknlab_config_destroy(p); }
};

struct ReportHandle {
  cknlab_report* p = nullptr;
  ~ReportHandle() { cknlab_report_destroy(p); }
};

int report_error(cknlab_status st) {
  std::fprintf(stderr, "cknlab: %s\n", cknlab_last_error());
  return static_cast<int>(st);
}

void print_line(const char* line, void*) { std::printf("%s\n", line); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sharp constants, mode scans and variational estimates for second-order weighted inequalities"};
  app.require_subcommand(1);
  app.fallthrough();

  // Every flag is kept as text and handed to the library unchanged, so the
  // command line and the config file share one parser.
  std::map<std::string, std::string> values;
  std::vector<std::pair<std::string, CLI::Option*>> flags;
  auto text = [&](const std::string& name, const std::string& help) {
    flags.emplace_back(name, app.add_option("--" + name, values[name], help));
  };
  text("n", "dimension N");
  text("alpha", "weight exponent alpha");
  text("beta", "weight exponent beta");
  text("k", "spherical-harmonic mode index");
  text("kmax", "largest mode index scanned");
  text("basis", "comma-separated basis sizes, e.g. 4,8,16");
  text("a", "family amplitude");
  text("b", "family rate");
  text("seed", "random seed (default 42)");
  text("jobs", "concurrent per-mode tasks");
  text("format", "csv, json or plot-data");
  text("out", "output path (default: standard output)");
  text("rel-tol", "quadrature relative tolerance");
  text("formula", "mode-scan formula: J, K or DN");
  text("family", "extremal family: thmA, thm1.2-1a, thm1.2-1b, thm1.2-2, thmB, thmC-1, thmC-2, thmD");
  text("coeffs", "file of basis coefficients for quotient");
  bool test_function = false;
  auto* tf = app.add_flag("--test-function", test_function, "quotient of |x| e^{-|x|} times a degree-one harmonic");
  std::string config_path;
  auto* config_opt = app.add_option("--config", config_path, "key = value configuration file");

  const char* names[] = {"constants", "mode-scan", "quotient", "minimize", "probe-conjecture", "selftest"};
  const char* blurbs[] = {
      "closed-form sharp constant, bounds and reference constants",
      "per-mode closed-form quotients and their infimum over k",
      "quotient of an extremal family, the test function or a basis expansion",
      "variational estimate of one mode constant over nested bases",
      "per-mode variational scan at N = 4 (numerical evidence only)",
      "run the acceptance suite",
  };
  for (int i = 0; i < 6; ++i) app.add_subcommand(names[i], blurbs[i]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(CKNLAB_E_USAGE);
  }
  const std::string command = app.get_subcommands().front()->get_name();

  if (command == "selftest") {
    int failed = 0;
    const cknlab_status st = cknlab_selftest(print_line, nullptr, &failed);
    if (st != CKNLAB_OK) return report_error(st);
    return failed == 0 ? 0 : static_cast<int>(CKNLAB_E_CONSISTENCY);
  }

  ConfigHandle cfg;
  cknlab_status st = cknlab_config_create(&cfg.p);
  if (st != CKNLAB_OK) return report_error(st);
  if (config_opt->count() == 0) {
    if (const char* env = std::getenv("CKNLAB_CONFIG"); env && *env) config_path = env;
  }
  if (!config_path.empty()) {
    st = cknlab_config_load_file(cfg.p, config_path.c_str());
    if (st != CKNLAB_OK) return report_error(st);
  }
  st = cknlab_config_set(cfg.p, "command", command.c_str());
  if (st != CKNLAB_OK) return report_error(st);
  for (const auto& [name, opt] : flags) {
    if (opt->count() == 0) continue;
    st = cknlab_config_set(cfg.p, name.c_str(), values[name].c_str());
    if (st != CKNLAB_OK) return report_error(st);
  }
  if (tf->count() > 0) {
    st = cknlab_config_set(cfg.p, "test-function", test_function ? "true" : "false");
    if (st != CKNLAB_OK) return report_error(st);
  }

  ReportHandle rep;
  st = cknlab_run(cfg.p, &rep.p);
  if (st != CKNLAB_OK) return report_error(st);

  for (size_t i = 0; i < cknlab_report_warning_count(rep.p); ++i) {
    std::fprintf(stderr, "warning: %s\n", cknlab_report_warning(rep.p, i));
  }
  const std::string out = cknlab_report_output_path(rep.p);
  if (out.empty()) {
    const char* text_out = cknlab_report_render(rep.p, nullptr);
    if (!text_out) return report_error(CKNLAB_E_INTERNAL);
    std::fputs(text_out, stdout);
  } else {
    st = cknlab_report_write(rep.p, out.c_str(), nullptr);
    if (st != CKNLAB_OK) return report_error(st);
  }
  return cknlab_report_status(rep.p);
}
