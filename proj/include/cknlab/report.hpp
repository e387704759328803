#pragma once

// Run configuration, the structured report every command produces, and its
// JSON / CSV / plot-data renderings.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cknlab/params.hpp"
#include "cknlab/quadrature.hpp"

namespace cknlab::report {

enum class Format { csv, json, plot_data };
const char* to_string(Format f);
Format parse_format(const std::string& s);

struct RunConfig {
  std::string command;
  InequalityParams params;
  quadrature::QuadratureSpec quadrature;
  std::vector<int> basis_sizes;  // empty: the command's default
  int k = 0;
  int k_max = 8;
  std::uint64_t seed = 42;
  int jobs = 1;
  Format output_format = Format::json;
  std::string output_path;  // empty: standard output
  std::string formula;      // mode-scan: J, K or DN (empty: J when alpha = 0)
  std::optional<std::string> family;
  double a = 1.0;
  double b = 1.0;
  bool test_function = false;
  std::string coeffs_path;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Applies one key=value setting; keys are the long flag names without the
/// leading dashes ("n", "alpha", "basis", "rel-tol", ...). Throws a usage
/// error on an unknown key or a malformed value.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

/// Flat key=value file; '#' starts a comment, blank lines are skipped.
void load_config_file(RunConfig& cfg, const std::string& path);

using Diagnostic = std::variant<bool, std::int64_t, double, std::string>;

struct ModeRow {
  int k = 0;
  double value = 0.0;
  std::string formula;  // exact value of the closed-form mode quotient, if any
  bool argmin = false;
  bool tail_verified = false;
  std::optional<double> raw;
  std::optional<double> effective;
  std::optional<double> hardy_factor;
  std::optional<bool> converged;

  friend bool operator==(const ModeRow&, const ModeRow&) = default;
};

struct TraceRow {
  int m = 0;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;

  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

struct Bounds {
  double lower = 0.0;
  double upper = 0.0;
  double conjectured = 0.0;
  std::string exact_lower, exact_upper, exact_conjectured;
  bool conjecture_open = false;

  friend bool operator==(const Bounds&, const Bounds&) = default;
};

struct Reference {
  std::string name;
  std::optional<double> value;
  bool precondition_met = true;
  std::string note;

  friend bool operator==(const Reference&, const Reference&) = default;
};

struct SharpConstantReport {
  std::string command;
  InequalityParams params;
  std::optional<int> k;
  std::uint64_t seed = 42;

  std::optional<double> closed_form;
  std::optional<std::string> closed_form_exact;
  std::optional<double> quadrature_value;
  std::optional<double> variational_estimate;
  std::optional<Bounds> bounds;
  std::optional<double> lower_bound;
  std::optional<std::string> lower_bound_exact;

  std::vector<ModeRow> modes;
  std::vector<TraceRow> trace;
  std::vector<Reference> references;
  std::optional<int> argmin;
  std::optional<std::string> verdict;
  std::optional<std::string> banner;

  std::map<std::string, Diagnostic> diagnostics;
  std::map<std::string, std::string> provenance;
  std::vector<std::string> flags;  // "discrepancy", "conjecture-open", ...
  std::vector<std::string> warnings;
  bool discrepancy = false;
  int status = 0;  // process exit code the report maps to

  friend bool operator==(const SharpConstantReport&, const SharpConstantReport&) = default;

  void add_flag(const std::string& f);
  bool has_flag(const std::string& f) const;
};

std::string to_json(const SharpConstantReport& r);
SharpConstantReport from_json(const std::string& text);

/// Header, fixed leading columns k,value,formula,argmin,tail_verified and
/// 17 significant digits. Reports without a mode table fall back to a trace
/// table (m,value,...) or to field,value pairs.
std::string to_csv(const SharpConstantReport& r);

/// Blocks of whitespace-separated (x, y) pairs, each headed by a '#' comment
/// and separated by blank lines.
std::string to_plot_data(const SharpConstantReport& r);

std::string render(const SharpConstantReport& r, Format f);

/// Writes to a temporary file in the target directory, then renames.
void write_atomically(const std::string& path, const std::string& content);

/// Runs the command named in the configuration.
SharpConstantReport run(const RunConfig& cfg);

SharpConstantReport cmd_constants(const RunConfig& cfg);
SharpConstantReport cmd_mode_scan(const RunConfig& cfg);
SharpConstantReport cmd_quotient(const RunConfig& cfg);
SharpConstantReport cmd_minimize(const RunConfig& cfg);
SharpConstantReport cmd_probe_conjecture(const RunConfig& cfg);
SharpConstantReport cmd_selftest(const RunConfig& cfg);

}  // namespace cknlab::report
