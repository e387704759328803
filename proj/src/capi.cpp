#include "cknlab/cknlab.h"

#include <exception>
#include <new>
#include <string>

#include "cknlab/acceptance.hpp"
#include "cknlab/constants.hpp"
#include "cknlab/error.hpp"
#include "cknlab/functionals.hpp"
#include "cknlab/report.hpp"
#include "cknlab/special.hpp"

struct cknlab_config {
  cknlab::report::RunConfig cfg;
};

struct cknlab_report {
  cknlab::report::SharpConstantReport report;
  cknlab::report::Format format = cknlab::report::Format::json;
  std::string output_path;
  std::string rendered;
};

namespace {

thread_local std::string last_error;

cknlab_status to_status(cknlab::ErrorKind kind) {
  return static_cast<cknlab_status>(cknlab::exit_code(kind));
}

template <class F>
cknlab_status guard(F&& f) {
  try {
    f();
    last_error.clear();
    return CKNLAB_OK;
  } catch (const cknlab::Error& e) {
    last_error = std::string(cknlab::to_string(e.kind())) + ": " + e.what();
    return to_status(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return CKNLAB_E_INTERNAL;
  } catch (const std::exception& e) {
    last_error = std::string("internal: ") + e.what();
    return CKNLAB_E_INTERNAL;
  } catch (...) {
    last_error = "internal: unknown exception";
    return CKNLAB_E_INTERNAL;
  }
}

cknlab_status null_arg(const char* what) {
  last_error = std::string("usage: null ") + what;
  return CKNLAB_E_USAGE;
}

}  // namespace

extern "C" {

const char* cknlab_version(void) { return "1.0.0"; }

const char* cknlab_last_error(void) { return last_error.c_str(); }

cknlab_status cknlab_config_create(cknlab_config** out) {
  if (!out) return null_arg("output pointer");
  return guard([&] { *out = new cknlab_config(); });
}

void cknlab_config_destroy(cknlab_config* cfg) { delete cfg; }

cknlab_status cknlab_config_set(cknlab_config* cfg, const char* key, const char* value) {
  if (!cfg) return null_arg("config");
  if (!key) return null_arg("key");
  return guard([&] { cknlab::report::apply_setting(cfg->cfg, key, value ? value : ""); });
}

cknlab_status cknlab_config_load_file(cknlab_config* cfg, const char* path) {
  if (!cfg) return null_arg("config");
  if (!path) return null_arg("path");
  return guard([&] { cknlab::report::load_config_file(cfg->cfg, path); });
}

cknlab_status cknlab_run(const cknlab_config* cfg, cknlab_report** out) {
  if (!cfg) return null_arg("config");
  if (!out) return null_arg("output pointer");
  *out = nullptr;
  return guard([&] {
    auto* r = new cknlab_report();
    try {
      r->report = cknlab::report::run(cfg->cfg);
    } catch (...) {
      delete r;
      throw;
    }
    r->format = cfg->cfg.output_format;
    r->output_path = cfg->cfg.output_path;
    *out = r;
  });
}

void cknlab_report_destroy(cknlab_report* report) { delete report; }

int cknlab_report_status(const cknlab_report* report) {
  return report ? report->report.status : static_cast<int>(CKNLAB_E_USAGE);
}

const char* cknlab_report_render(cknlab_report* report, const char* format) {
  if (!report) {
    null_arg("report");
    return nullptr;
  }
  const cknlab_status st = guard([&] {
    const auto f = format ? cknlab::report::parse_format(format) : report->format;
    report->rendered = cknlab::report::render(report->report, f);
  });
  return st == CKNLAB_OK ? report->rendered.c_str() : nullptr;
}

const char* cknlab_report_output_path(const cknlab_report* report) {
  return report ? report->output_path.c_str() : "";
}

cknlab_status cknlab_report_write(cknlab_report* report, const char* path, const char* format) {
  if (!report) return null_arg("report");
  if (!path || !*path) return null_arg("path");
  return guard([&] {
    const auto f = format ? cknlab::report::parse_format(format) : report->format;
    cknlab::report::write_atomically(path, cknlab::report::render(report->report, f));
  });
}

size_t cknlab_report_warning_count(const cknlab_report* report) {
  return report ? report->report.warnings.size() : 0;
}

const char* cknlab_report_warning(const cknlab_report* report, size_t i) {
  if (!report || i >= report->report.warnings.size()) return nullptr;
  return report->report.warnings[i].c_str();
}

cknlab_status cknlab_gamma(double t, double* out) {
  if (!out) return null_arg("output pointer");
  return guard([&] { *out = cknlab::special::gamma(t); });
}

cknlab_status cknlab_weighted_exp_integral(double p, double c, double q, double* out) {
  if (!out) return null_arg("output pointer");
  return guard([&] { *out = cknlab::special::weighted_exp_integral(p, c, q); });
}

cknlab_status cknlab_sharp_constant(int n, double alpha, double* out) {
  if (!out) return null_arg("output pointer");
  return guard([&] { *out = cknlab::constants::sharp_constant_closed_form({n, alpha, std::nullopt}); });
}

cknlab_status cknlab_mode_quotient_j(int n, int k, double* out) {
  if (!out) return null_arg("output pointer");
  return guard([&] { *out = cknlab::constants::mode_quotient_J(n, k).value; });
}

cknlab_status cknlab_mode_quotient_k(int n, double alpha, int k, double* out) {
  if (!out) return null_arg("output pointer");
  return guard([&] { *out = cknlab::constants::mode_quotient_K({n, alpha, std::nullopt}, k).value; });
}

cknlab_status cknlab_test_function_quotient(int n, double* out) {
  if (!out) return null_arg("output pointer");
  return guard([&] { *out = cknlab::functionals::test_function_quotient(n); });
}

cknlab_status cknlab_extremal_quotient(const char* family, int n, double alpha, double a, double b, int k,
                                       double* out) {
  if (!family) return null_arg("family");
  if (!out) return null_arg("output pointer");
  return guard([&] {
    namespace fn = cknlab::functionals;
    const cknlab::InequalityParams p{n, alpha, std::nullopt};
    const auto prof = fn::extremal_profile({fn::parse_family(family), a, b, p});
    *out = n == 1 ? fn::one_dim_quotient(prof, alpha) : fn::mode_quotient(prof, p, k);
  });
}

cknlab_status cknlab_selftest(cknlab_line_fn fn, void* user, int* failed) {
  return guard([&] {
    int bad = 0;
    for (int id = 1; id <= cknlab::acceptance::kCriterionCount; ++id) {
      const auto r = cknlab::acceptance::run_criterion(id);
      if (!r.passed) ++bad;
      if (fn) fn(cknlab::acceptance::format_line(r).c_str(), user);
    }
    if (failed) *failed = bad;
  });
}

}  // extern "C"
