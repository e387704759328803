#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "cknlab/error.hpp"
#include "cknlab/report.hpp"

using namespace cknlab;
using namespace cknlab::report;
namespace fs = std::filesystem;

namespace {

RunConfig config(std::initializer_list<std::pair<const char*, const char*>> kv) {
  RunConfig cfg;
  for (const auto& [k, v] : kv) apply_setting(cfg, k, v);
  return cfg;
}

fs::path temp_dir() {
  const fs::path d = fs::temp_directory_path() / ("cknlab_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                                  "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, SettingsAndErrors) {
  const auto cfg = config({{"command", "minimize"}, {"n", "4"}, {"alpha", "0.5"}, {"basis", "4,8,16"},
                           {"format", "csv"}, {"seed", "9"}, {"rel-tol", "1e-10"}});
  EXPECT_EQ(cfg.params.N, 4);
  EXPECT_EQ(cfg.params.alpha, 0.5);
  EXPECT_EQ(cfg.basis_sizes, (std::vector<int>{4, 8, 16}));
  EXPECT_EQ(cfg.output_format, Format::csv);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.quadrature.rel_tol, 1e-10);
  RunConfig c;
  EXPECT_THROW(apply_setting(c, "colour", "blue"), Error);
  EXPECT_THROW(apply_setting(c, "n", "four"), Error);
  EXPECT_THROW(apply_setting(c, "basis", "4,,x"), Error);
  EXPECT_THROW(apply_setting(c, "format", "xml"), Error);
  try {
    apply_setting(c, "colour", "blue");
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::usage);
  }
}

TEST(Config, FileThenOverrides) {
  const auto dir = temp_dir();
  const auto path = dir / "run.cfg";
  std::ofstream(path) << "# comment\ncommand = constants\n\nn = 7\nalpha = 0.2  # trailing\nformat = csv\n";
  RunConfig cfg;
  load_config_file(cfg, path.string());
  EXPECT_EQ(cfg.command, "constants");
  EXPECT_EQ(cfg.params.N, 7);
  EXPECT_DOUBLE_EQ(cfg.params.alpha, 0.2);
  apply_setting(cfg, "n", "9");
  EXPECT_EQ(cfg.params.N, 9);
  EXPECT_EQ(cfg.output_format, Format::csv);
  RunConfig missing;
  try {
    load_config_file(missing, (dir / "absent.cfg").string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io);
  }
  fs::remove_all(dir);
}

TEST(Json, RoundTripOfCommandReports) {
  for (auto cfg : {config({{"command", "constants"}, {"n", "5"}}), config({{"command", "constants"}, {"n", "2"}}),
                   config({{"command", "mode-scan"}, {"n", "3"}, {"kmax", "6"}}),
                   config({{"command", "quotient"}, {"family", "thm1.2-2"}, {"n", "6"}, {"b", "2"}}),
                   config({{"command", "minimize"}, {"n", "5"}, {"basis", "2,4"}})}) {
    const auto r = run(cfg);
    const auto back = from_json(to_json(r));
    EXPECT_EQ(back, r) << cfg.command;
    EXPECT_EQ(to_json(back), to_json(r));
  }
}

TEST(Json, NonFiniteValuesSurvive) {
  SharpConstantReport r;
  r.command = "quotient";
  r.quadrature_value = std::numeric_limits<double>::infinity();
  r.diagnostics["x"] = std::numeric_limits<double>::quiet_NaN();
  r.diagnostics["n"] = std::int64_t{3};
  r.diagnostics["s"] = std::string("inf");
  const auto back = from_json(to_json(r));
  EXPECT_TRUE(std::isinf(*back.quadrature_value));
  EXPECT_TRUE(std::isnan(std::get<double>(back.diagnostics.at("x"))));
  EXPECT_EQ(std::get<std::int64_t>(back.diagnostics.at("n")), 3);
  EXPECT_EQ(std::get<std::string>(back.diagnostics.at("s")), "inf");
  EXPECT_THROW(from_json("{not json"), Error);
}

TEST(Csv, ModeTableIsByteDeterministic) {
  const auto cfg = config({{"command", "mode-scan"}, {"n", "3"}, {"kmax", "4"}, {"formula", "J"}});
  const auto a = to_csv(run(cfg));
  const auto b = to_csv(run(cfg));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.substr(0, a.find('\n')), "k,value,formula,argmin,tail_verified");
  EXPECT_NE(a.find("\n1,2.25,9/4,true,true\n"), std::string::npos);
  EXPECT_NE(a.find("\n2,7.1111111111111107,64/9,false,true\n"), std::string::npos);
}

TEST(Csv, FallbackTables) {
  const auto tr = to_csv(run(config({{"command", "minimize"}, {"n", "5"}, {"basis", "2,4"}})));
  EXPECT_EQ(tr.substr(0, tr.find('\n')), "m,value,converged,iterations,gradient_norm");
  const auto fv = to_csv(run(config({{"command", "quotient"}, {"test-function", "true"}, {"n", "3"}})));
  EXPECT_EQ(fv.substr(0, fv.find('\n')), "field,value");
}

TEST(PlotData, CommentedBlocks) {
  const auto out = to_plot_data(run(config({{"command", "mode-scan"}, {"n", "4"}, {"kmax", "3"}})));
  ASSERT_FALSE(out.empty());
  EXPECT_EQ(out[0], '#');
  EXPECT_NE(out.find("\n1 5.87130"), std::string::npos);
}

TEST(Output, AtomicWriteReplacesFile) {
  const auto dir = temp_dir();
  const auto path = dir / "out.json";
  std::ofstream(path) << "old";
  write_atomically(path.string(), "new content\n");
  EXPECT_EQ(slurp(path), "new content\n");
  std::size_t entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++entries;
  EXPECT_EQ(entries, 1u);
  try {
    write_atomically((dir / "missing" / "x.json").string(), "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io);
  }
  fs::remove_all(dir);
}

TEST(Commands, ConstantsFlagsAndStatus) {
  const auto r5 = run(config({{"command", "constants"}, {"n", "5"}}));
  EXPECT_EQ(r5.status, 0);
  EXPECT_EQ(*r5.closed_form_exact, "9");
  EXPECT_FALSE(r5.discrepancy);
  const auto r4 = run(config({{"command", "constants"}, {"n", "4"}}));
  EXPECT_TRUE(r4.has_flag("conjecture-open"));
  EXPECT_EQ(r4.bounds->exact_lower, "3969/676");
  try {
    run(config({{"command", "constants"}, {"n", "3"}, {"alpha", "1"}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(exit_code(e.kind()), 2);
  }
}

TEST(Commands, QuotientNeedsExactlyOneSource) {
  EXPECT_THROW(run(config({{"command", "quotient"}, {"n", "3"}})), Error);
  EXPECT_THROW(run(config({{"command", "quotient"}, {"n", "3"}, {"test-function", "true"}, {"family", "thmB"}})),
               Error);
}

TEST(Commands, QuotientFromCoefficientFile) {
  const auto dir = temp_dir();
  const auto path = dir / "c.txt";
  std::ofstream(path) << "# one basis function\n1.0\n";
  const auto r = run(config({{"command", "quotient"}, {"n", "5"}, {"coeffs", path.string().c_str()}}));
  // v' = r e^{-r} is the radial extremal shape at alpha = 0
  EXPECT_NEAR(*r.quadrature_value, 9.0, 1e-9);
  std::ofstream(path) << "1.0 abc\n";
  EXPECT_THROW(run(config({{"command", "quotient"}, {"n", "5"}, {"coeffs", path.string().c_str()}})), Error);
  fs::remove_all(dir);
}

TEST(Commands, ModeScanOptions) {
  EXPECT_THROW(run(config({{"command", "mode-scan"}, {"n", "5"}, {"kmax", "1"}})), Error);
  EXPECT_THROW(run(config({{"command", "mode-scan"}, {"n", "12"}, {"alpha", "1"}, {"formula", "J"}})), Error);
  const auto r = run(config({{"command", "mode-scan"}, {"n", "12"}, {"alpha", "1"}, {"kmax", "5"}}));
  EXPECT_EQ(r.modes.size(), 6u);
  EXPECT_EQ(*r.argmin, 0);
  EXPECT_EQ(r.modes[1].formula, "625/9");
}

TEST(Commands, UnknownCommand) {
  EXPECT_THROW(run(config({{"command", "frobnicate"}})), Error);
}
