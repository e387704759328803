#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "cknlab/cknlab.h"

namespace fs = std::filesystem;

namespace {

struct Config {
  cknlab_config* p = nullptr;
  Config() { EXPECT_EQ(cknlab_config_create(&p), CKNLAB_OK); }
  ~Config() { cknlab_config_destroy(p); }
};

int cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + CKNLAB_CLI_PATH + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string cli_output(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + CKNLAB_CLI_PATH + " " + args + " 2>/dev/null";
  std::string out;
  if (FILE* f = popen(cmd.c_str(), "r")) {
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, f)) out.append(buf, n);
    pclose(f);
  }
  return out;
}

}  // namespace

TEST(CApi, NumericEntryPoints) {
  double v = 0;
  ASSERT_EQ(cknlab_gamma(5.0, &v), CKNLAB_OK);
  EXPECT_NEAR(v, 24.0, 1e-12);
  ASSERT_EQ(cknlab_weighted_exp_integral(2, 1, 1, &v), CKNLAB_OK);
  EXPECT_NEAR(v, 2.0, 1e-14);
  ASSERT_EQ(cknlab_sharp_constant(5, 0.0, &v), CKNLAB_OK);
  EXPECT_EQ(v, 9.0);
  ASSERT_EQ(cknlab_mode_quotient_j(3, 1, &v), CKNLAB_OK);
  EXPECT_EQ(v, 2.25);
  ASSERT_EQ(cknlab_mode_quotient_k(12, 1.0, 0, &v), CKNLAB_OK);
  EXPECT_EQ(v, 64.0);
  ASSERT_EQ(cknlab_test_function_quotient(3, &v), CKNLAB_OK);
  EXPECT_NEAR(v, 3.36, 1e-10);
  ASSERT_EQ(cknlab_extremal_quotient("thm1.2-2", 5, 0.0, 1.0, 2.0, 0, &v), CKNLAB_OK);
  EXPECT_NEAR(v, 9.0, 1e-9);
  ASSERT_EQ(cknlab_extremal_quotient("thm1.2-1b", 1, 1.0, 1.0, 1.0, 0, &v), CKNLAB_OK);
  EXPECT_NEAR(v, 6.25, 1e-9);
}

TEST(CApi, StatusCodesAndMessages) {
  double v = 0;
  EXPECT_EQ(cknlab_gamma(-1.0, &v), CKNLAB_E_PRECONDITION);
  EXPECT_NE(std::string(cknlab_last_error()).find("domain"), std::string::npos);
  EXPECT_EQ(cknlab_gamma(2.0, &v), CKNLAB_OK);
  EXPECT_STREQ(cknlab_last_error(), "");
  EXPECT_EQ(cknlab_sharp_constant(3, 1.0, &v), CKNLAB_E_PRECONDITION);
  EXPECT_NE(std::string(cknlab_last_error()).find("N >= 5*alpha + 5"), std::string::npos);
  EXPECT_EQ(cknlab_extremal_quotient("bogus", 5, 0, 1, 1, 0, &v), CKNLAB_E_USAGE);
}

TEST(CApi, NullArguments) {
  EXPECT_EQ(cknlab_gamma(1.0, nullptr), CKNLAB_E_USAGE);
  EXPECT_EQ(cknlab_config_create(nullptr), CKNLAB_E_USAGE);
  EXPECT_EQ(cknlab_config_set(nullptr, "n", "3"), CKNLAB_E_USAGE);
  EXPECT_EQ(cknlab_run(nullptr, nullptr), CKNLAB_E_USAGE);
  EXPECT_EQ(cknlab_report_render(nullptr, nullptr), nullptr);
  EXPECT_EQ(cknlab_report_status(nullptr), CKNLAB_E_USAGE);
  EXPECT_EQ(cknlab_report_warning(nullptr, 0), nullptr);
  cknlab_config_destroy(nullptr);
  cknlab_report_destroy(nullptr);
}

TEST(CApi, RunAndRender) {
  Config cfg;
  ASSERT_EQ(cknlab_config_set(cfg.p, "command", "mode-scan"), CKNLAB_OK);
  ASSERT_EQ(cknlab_config_set(cfg.p, "n", "3"), CKNLAB_OK);
  ASSERT_EQ(cknlab_config_set(cfg.p, "kmax", "4"), CKNLAB_OK);
  EXPECT_EQ(cknlab_config_set(cfg.p, "nope", "1"), CKNLAB_E_USAGE);
  cknlab_report* rep = nullptr;
  ASSERT_EQ(cknlab_run(cfg.p, &rep), CKNLAB_OK);
  EXPECT_EQ(cknlab_report_status(rep), 0);
  const std::string csv = cknlab_report_render(rep, "csv");
  EXPECT_NE(csv.find("1,2.25,9/4,true,true"), std::string::npos);
  const std::string json = cknlab_report_render(rep, "json");
  EXPECT_EQ(json[0], '{');
  EXPECT_EQ(cknlab_report_render(rep, "yaml"), nullptr);
  cknlab_report_destroy(rep);
}

TEST(CApi, FailedRunLeavesNoReport) {
  Config cfg;
  cknlab_config_set(cfg.p, "command", "constants");
  cknlab_config_set(cfg.p, "n", "3");
  cknlab_config_set(cfg.p, "alpha", "1");
  cknlab_report* rep = reinterpret_cast<cknlab_report*>(0x1);
  EXPECT_EQ(cknlab_run(cfg.p, &rep), CKNLAB_E_PRECONDITION);
  EXPECT_EQ(rep, nullptr);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("constants --n 5 --alpha 0"), 0);
  EXPECT_EQ(cli("constants --n 3 --alpha 1"), 2);
  EXPECT_EQ(cli("constants --bogus"), 1);
  EXPECT_EQ(cli(""), 1);
  EXPECT_EQ(cli("quotient --n 3"), 1);
  EXPECT_EQ(cli("quotient --n 5 --coeffs /nonexistent/file"), 5);
  EXPECT_EQ(cli("--help"), 0);
}

TEST(Cli, OutputFileAndConfigEnvironment) {
  const fs::path dir = fs::temp_directory_path() / "cknlab_cli_test";
  fs::create_directories(dir);
  const fs::path out = dir / "scan.csv";
  ASSERT_EQ(cli("mode-scan --n 3 --kmax 3 --format csv --out " + out.string()), 0);
  std::ifstream in(out);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_NE(ss.str().find("1,2.25,9/4,true,true"), std::string::npos);

  const fs::path conf = dir / "run.cfg";
  std::ofstream(conf) << "n = 9\nformat = csv\nkmax = 3\n";
  const std::string env = "CKNLAB_CONFIG=" + conf.string();
  EXPECT_NE(cli_output("mode-scan", env).find("0,25,25,true"), std::string::npos);
  // flags override the file
  EXPECT_NE(cli_output("mode-scan --n 5", env).find("0,9,9,true"), std::string::npos);
  // an explicit --config wins over the environment
  const fs::path other = dir / "other.cfg";
  std::ofstream(other) << "n = 5\nformat = csv\nkmax = 3\n";
  EXPECT_NE(cli_output("mode-scan --config " + other.string(), env).find("0,9,9,true"), std::string::npos);
  fs::remove_all(dir);
}
