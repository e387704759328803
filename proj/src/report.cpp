#include "cknlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <unistd.h>

#include "json.hpp"

#include "cknlab/error.hpp"

namespace cknlab::report {

using nlohmann::json;

const char* to_string(Format f) {
  switch (f) {
    case Format::csv: return "csv";
    case Format::json: return "json";
    case Format::plot_data: return "plot-data";
  }
  return "json";
}

Format parse_format(const std::string& s) {
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  if (s == "plot-data") return Format::plot_data;
  fail(ErrorKind::usage, "unknown output format '" + s + "' (expected csv, json or plot-data)");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    fail(ErrorKind::usage, "--" + key + ": expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    fail(ErrorKind::usage, "--" + key + ": expected an integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v.empty() || v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  fail(ErrorKind::usage, "--" + key + ": expected a boolean, got '" + v + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(static_cast<int>(parse_int(key, item)));
  }
  if (out.empty()) fail(ErrorKind::usage, "--" + key + ": empty list");
  return out;
}

}  // namespace

void apply_setting(RunConfig& cfg, const std::string& key_in, const std::string& value_in) {
  const std::string key = trim(key_in);
  const std::string v = trim(value_in);
  if (key == "command") cfg.command = v;
  else if (key == "n") cfg.params.N = static_cast<int>(parse_int(key, v));
  else if (key == "alpha") cfg.params.alpha = parse_double(key, v);
  else if (key == "beta") {
    if (v.empty() || v == "none") cfg.params.beta.reset();
    else cfg.params.beta = parse_double(key, v);
  }
  else if (key == "k") cfg.k = static_cast<int>(parse_int(key, v));
  else if (key == "kmax") cfg.k_max = static_cast<int>(parse_int(key, v));
  else if (key == "basis") cfg.basis_sizes = parse_int_list(key, v);
  else if (key == "a") cfg.a = parse_double(key, v);
  else if (key == "b") cfg.b = parse_double(key, v);
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_int(key, v));
  else if (key == "jobs") cfg.jobs = static_cast<int>(parse_int(key, v));
  else if (key == "format") cfg.output_format = parse_format(v);
  else if (key == "out") cfg.output_path = v;
  else if (key == "rel-tol") cfg.quadrature.rel_tol = parse_double(key, v);
  else if (key == "max-level") cfg.quadrature.max_level = static_cast<int>(parse_int(key, v));
  else if (key == "split-point") cfg.quadrature.split_point = parse_double(key, v);
  else if (key == "formula") cfg.formula = v;
  else if (key == "family") {
    if (v.empty()) cfg.family.reset();
    else cfg.family = v;
  }
  else if (key == "test-function") cfg.test_function = parse_bool(key, v);
  else if (key == "coeffs") cfg.coeffs_path = v;
  else fail(ErrorKind::usage, "unknown setting '" + key + "'");
}

void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open config file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::usage, path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    apply_setting(cfg, key, line.substr(eq + 1));
  }
}

void SharpConstantReport::add_flag(const std::string& f) {
  if (!has_flag(f)) flags.push_back(f);
}

bool SharpConstantReport::has_flag(const std::string& f) const {
  return std::find(flags.begin(), flags.end(), f) != flags.end();
}

// ---------------------------------------------------------------- JSON

namespace {

json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

double get_num(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  return j.get<double>();
}

template <class T>
void put_opt(json& j, const char* key, const std::optional<T>& v) {
  if (!v) return;
  if constexpr (std::is_same_v<T, double>) j[key] = num(*v);
  else j[key] = *v;
}

template <class T>
void get_opt(const json& j, const char* key, std::optional<T>& v) {
  if (!j.contains(key) || j.at(key).is_null()) {
    v.reset();
    return;
  }
  if constexpr (std::is_same_v<T, double>) v = get_num(j.at(key));
  else v = j.at(key).get<T>();
}

json diag_to_json(const Diagnostic& d) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) {
          // Keep the type on the way back: a non-finite double is tagged.
          if (!std::isfinite(x)) return json{{"double", num(x)}};
          return x;
        } else {
          return x;
        }
      },
      d);
}

Diagnostic diag_from_json(const json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_object() && j.contains("double")) return get_num(j.at("double"));
  return j.get<std::string>();
}

}  // namespace

std::string to_json(const SharpConstantReport& r) {
  json j;
  j["command"] = r.command;
  json p;
  p["N"] = r.params.N;
  p["alpha"] = num(r.params.alpha);
  if (r.params.beta) p["beta"] = num(*r.params.beta);
  j["params"] = p;
  put_opt(j, "k", r.k);
  j["seed"] = r.seed;
  put_opt(j, "closed_form", r.closed_form);
  put_opt(j, "closed_form_exact", r.closed_form_exact);
  put_opt(j, "quadrature_value", r.quadrature_value);
  put_opt(j, "variational_estimate", r.variational_estimate);
  if (r.bounds) {
    const Bounds& b = *r.bounds;
    j["bounds"] = {{"lower", num(b.lower)},
                   {"upper", num(b.upper)},
                   {"conjectured", num(b.conjectured)},
                   {"exact_lower", b.exact_lower},
                   {"exact_upper", b.exact_upper},
                   {"exact_conjectured", b.exact_conjectured},
                   {"conjecture_open", b.conjecture_open}};
  }
  put_opt(j, "lower_bound", r.lower_bound);
  put_opt(j, "lower_bound_exact", r.lower_bound_exact);

  json modes = json::array();
  for (const auto& m : r.modes) {
    json row{{"k", m.k},
             {"value", num(m.value)},
             {"formula", m.formula},
             {"argmin", m.argmin},
             {"tail_verified", m.tail_verified}};
    put_opt(row, "raw", m.raw);
    put_opt(row, "effective", m.effective);
    put_opt(row, "hardy_factor", m.hardy_factor);
    put_opt(row, "converged", m.converged);
    modes.push_back(row);
  }
  j["modes"] = modes;

  json trace = json::array();
  for (const auto& t : r.trace) {
    trace.push_back({{"m", t.m},
                     {"value", num(t.value)},
                     {"converged", t.converged},
                     {"iterations", t.iterations},
                     {"gradient_norm", num(t.gradient_norm)}});
  }
  j["trace"] = trace;

  json refs = json::array();
  for (const auto& ref : r.references) {
    json row{{"name", ref.name}, {"precondition_met", ref.precondition_met}, {"note", ref.note}};
    put_opt(row, "value", ref.value);
    refs.push_back(row);
  }
  j["references"] = refs;

  put_opt(j, "argmin", r.argmin);
  put_opt(j, "verdict", r.verdict);
  put_opt(j, "banner", r.banner);
  json diag = json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = diag_to_json(v);
  j["diagnostics"] = diag;
  j["provenance"] = r.provenance;
  j["flags"] = r.flags;
  j["warnings"] = r.warnings;
  j["discrepancy"] = r.discrepancy;
  j["status"] = r.status;
  return j.dump(2) + "\n";
}

SharpConstantReport from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::io, std::string("malformed report JSON: ") + e.what());
  }
  SharpConstantReport r;
  try {
    r.command = j.at("command").get<std::string>();
    const json& p = j.at("params");
    r.params.N = p.at("N").get<int>();
    r.params.alpha = get_num(p.at("alpha"));
    get_opt(p, "beta", r.params.beta);
    get_opt(j, "k", r.k);
    r.seed = j.at("seed").get<std::uint64_t>();
    get_opt(j, "closed_form", r.closed_form);
    get_opt(j, "closed_form_exact", r.closed_form_exact);
    get_opt(j, "quadrature_value", r.quadrature_value);
    get_opt(j, "variational_estimate", r.variational_estimate);
    if (j.contains("bounds")) {
      const json& b = j.at("bounds");
      Bounds out;
      out.lower = get_num(b.at("lower"));
      out.upper = get_num(b.at("upper"));
      out.conjectured = get_num(b.at("conjectured"));
      out.exact_lower = b.at("exact_lower").get<std::string>();
      out.exact_upper = b.at("exact_upper").get<std::string>();
      out.exact_conjectured = b.at("exact_conjectured").get<std::string>();
      out.conjecture_open = b.at("conjecture_open").get<bool>();
      r.bounds = out;
    }
    get_opt(j, "lower_bound", r.lower_bound);
    get_opt(j, "lower_bound_exact", r.lower_bound_exact);
    for (const auto& row : j.at("modes")) {
      ModeRow m;
      m.k = row.at("k").get<int>();
      m.value = get_num(row.at("value"));
      m.formula = row.at("formula").get<std::string>();
      m.argmin = row.at("argmin").get<bool>();
      m.tail_verified = row.at("tail_verified").get<bool>();
      get_opt(row, "raw", m.raw);
      get_opt(row, "effective", m.effective);
      get_opt(row, "hardy_factor", m.hardy_factor);
      get_opt(row, "converged", m.converged);
      r.modes.push_back(m);
    }
    for (const auto& row : j.at("trace")) {
      TraceRow t;
      t.m = row.at("m").get<int>();
      t.value = get_num(row.at("value"));
      t.converged = row.at("converged").get<bool>();
      t.iterations = row.at("iterations").get<int>();
      t.gradient_norm = get_num(row.at("gradient_norm"));
      r.trace.push_back(t);
    }
    for (const auto& row : j.at("references")) {
      Reference ref;
      ref.name = row.at("name").get<std::string>();
      ref.precondition_met = row.at("precondition_met").get<bool>();
      ref.note = row.at("note").get<std::string>();
      get_opt(row, "value", ref.value);
      r.references.push_back(ref);
    }
    get_opt(j, "argmin", r.argmin);
    get_opt(j, "verdict", r.verdict);
    get_opt(j, "banner", r.banner);
    for (const auto& [k, v] : j.at("diagnostics").items()) r.diagnostics[k] = diag_from_json(v);
    r.provenance = j.at("provenance").get<std::map<std::string, std::string>>();
    r.flags = j.at("flags").get<std::vector<std::string>>();
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    r.discrepancy = j.at("discrepancy").get<bool>();
    r.status = j.at("status").get<int>();
  } catch (const json::exception& e) {
    fail(ErrorKind::io, std::string("report JSON does not match the schema: ") + e.what());
  }
  return r;
}

// ---------------------------------------------------------------- CSV

namespace {

std::string g17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

const char* b01(bool b) { return b ? "true" : "false"; }

std::string diag_text(const Diagnostic& d) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, bool>) return b01(x);
        else if constexpr (std::is_same_v<T, double>) return g17(x);
        else if constexpr (std::is_same_v<T, std::string>) return x;
        else return std::to_string(x);
      },
      d);
}

}  // namespace

std::string to_csv(const SharpConstantReport& r) {
  std::ostringstream os;
  if (!r.modes.empty()) {
    const bool extra = std::any_of(r.modes.begin(), r.modes.end(),
                                   [](const ModeRow& m) { return m.raw.has_value(); });
    os << "k,value,formula,argmin,tail_verified";
    if (extra) os << ",raw,effective,hardy_factor,converged";
    os << "\n";
    for (const auto& m : r.modes) {
      os << m.k << ',' << g17(m.value) << ',' << csv_field(m.formula) << ',' << b01(m.argmin) << ','
         << b01(m.tail_verified);
      if (extra) {
        os << ',' << (m.raw ? g17(*m.raw) : "") << ',' << (m.effective ? g17(*m.effective) : "")
           << ',' << (m.hardy_factor ? g17(*m.hardy_factor) : "") << ','
           << (m.converged ? b01(*m.converged) : "");
      }
      os << "\n";
    }
    return os.str();
  }
  if (!r.trace.empty()) {
    os << "m,value,converged,iterations,gradient_norm\n";
    for (const auto& t : r.trace) {
      os << t.m << ',' << g17(t.value) << ',' << b01(t.converged) << ',' << t.iterations << ','
         << g17(t.gradient_norm) << "\n";
    }
    return os.str();
  }
  os << "field,value\n";
  auto row = [&](const std::string& k, const std::string& v) { os << csv_field(k) << ',' << csv_field(v) << "\n"; };
  if (r.closed_form) row("closed_form", g17(*r.closed_form));
  if (r.closed_form_exact) row("closed_form_exact", *r.closed_form_exact);
  if (r.quadrature_value) row("quadrature_value", g17(*r.quadrature_value));
  if (r.variational_estimate) row("variational_estimate", g17(*r.variational_estimate));
  if (r.bounds) {
    row("bounds.lower", g17(r.bounds->lower));
    row("bounds.upper", g17(r.bounds->upper));
    row("bounds.conjectured", g17(r.bounds->conjectured));
  }
  for (const auto& ref : r.references) {
    row("reference." + ref.name, ref.value ? g17(*ref.value) : "");
  }
  for (const auto& [k, v] : r.diagnostics) row("diagnostics." + k, diag_text(v));
  return os.str();
}

std::string to_plot_data(const SharpConstantReport& r) {
  std::ostringstream os;
  bool first = true;
  auto block = [&](const std::string& title) {
    if (!first) os << "\n\n";
    first = false;
    os << "# " << title << "\n";
  };
  if (!r.modes.empty()) {
    block("k value");
    for (const auto& m : r.modes) os << m.k << ' ' << g17(m.value) << "\n";
    if (std::any_of(r.modes.begin(), r.modes.end(), [](const ModeRow& m) { return m.raw.has_value(); })) {
      block("k raw");
      for (const auto& m : r.modes)
        if (m.raw) os << m.k << ' ' << g17(*m.raw) << "\n";
      block("k effective");
      for (const auto& m : r.modes)
        if (m.effective) os << m.k << ' ' << g17(*m.effective) << "\n";
    }
  }
  if (!r.trace.empty()) {
    block("m value");
    for (const auto& t : r.trace) os << t.m << ' ' << g17(t.value) << "\n";
  }
  if (first) {
    // Scalar reports: one point per value at x = N.
    auto point = [&](const char* name, const std::optional<double>& v) {
      if (!v) return;
      block(std::string("N ") + name);
      os << r.params.N << ' ' << g17(*v) << "\n";
    };
    point("closed_form", r.closed_form);
    point("quadrature_value", r.quadrature_value);
    point("variational_estimate", r.variational_estimate);
    if (r.bounds) {
      point("bounds.lower", r.bounds->lower);
      point("bounds.upper", r.bounds->upper);
    }
  }
  return os.str();
}

std::string render(const SharpConstantReport& r, Format f) {
  switch (f) {
    case Format::csv: return to_csv(r);
    case Format::json: return to_json(r);
    case Format::plot_data: return to_plot_data(r);
  }
  return to_json(r);
}

void write_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path dir = target.parent_path();
  if (dir.empty()) dir = ".";
  std::random_device rd;
  const fs::path tmp =
      dir / ("." + target.filename().string() + ".tmp" + std::to_string(::getpid()) + "_" + std::to_string(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::io, "cannot create " + tmp.string());
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      fail(ErrorKind::io, "write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorKind::io, "cannot rename onto " + path + ": " + ec.message());
  }
}

}  // namespace cknlab::report
