#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "iml/iml.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
};

CliResult run(const std::string& args) {
  const std::string cmd = std::string(IML_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, ""};
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
  return f;
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("iml_cli_" + std::to_string(::getpid()));
  fs::create_directories(d);
  return d / name;
}

}  // namespace

TEST(Cli, EvalDiscDensity) {
  const CliResult r = run("eval --domain unit-disc --quantity kobayashi_kappa --at 0.9+0i");
  ASSERT_EQ(r.code, 0);
  std::stringstream ss(r.out);
  std::string header, row;
  std::getline(ss, header);
  std::getline(ss, row);
  EXPECT_EQ(header, "domain,z,quantity,value,uncertainty,method");
  const auto f = split(row);
  ASSERT_EQ(f.size(), 6u);
  EXPECT_NEAR(std::stod(f[3]), 1.0 / (1.0 - 0.81), 1e-14);
}

TEST(Cli, EvalSeveralPoints) {
  const CliResult r = run("eval --domain half-plane --at 0+1i --at 0.5+2i");
  ASSERT_EQ(r.code, 0);
  EXPECT_GE(std::count(r.out.begin(), r.out.end(), '\n'), 3);
}

TEST(Cli, DistKinds) {
  CliResult r = run("dist --domain unit-disc --kind kobayashi --from 0+0i --to 0.5+0i");
  ASSERT_EQ(r.code, 0);
  auto row = split(r.out.substr(r.out.find('\n') + 1));
  ASSERT_GE(row.size(), 5u);
  EXPECT_NEAR(std::stod(row[4]), std::atanh(0.5), 1e-14);
  r = run("dist --domain half-plane --kind s --from 0+1i --to 1+1i");
  ASSERT_EQ(r.code, 0);
  row = split(r.out.substr(r.out.find('\n') + 1));
  EXPECT_NEAR(std::stod(row[4]), std::asinh(0.5), 1e-14);
}

TEST(Cli, VerifyExitCodes) {
  const fs::path out = scratch("prop1.json");
  CliResult r = run("verify prop1 --domain unit-disc --out " + out.string());
  EXPECT_EQ(r.code, 0);
  const iml::json j = iml::json::parse(slurp(out));
  EXPECT_EQ(j["verdict"], "pass");
  EXPECT_NEAR(j["estimate"].get<double>(), 0.25, 1e-9);
  r = run("verify example-a --eps 0.5");
  EXPECT_EQ(r.code, 0);
  EXPECT_NEAR(iml::json::parse(r.out)["estimate"].get<double>(), 0.125, 5e-3);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("verify prop9 --domain unit-disc").code, 2);
  EXPECT_EQ(run("eval --domain unit-disc --quantity nope --at 0.1+0i").code, 2);
  EXPECT_EQ(run("eval --domain unit-disc --at 0.1+zi").code, 2);
  EXPECT_EQ(run("eval --domain unit-disc --at 2+0i").code, 2);
  EXPECT_EQ(run("eval --domain teapot --at 0+0i").code, 2);
  EXPECT_EQ(run("eval --domain unit-disc --at 0+0i --out /nonexistent/dir/x.csv").code, 2);
  EXPECT_EQ(run("verify prop1").code, 2);
}

TEST(Cli, OutputIsDeterministic) {
  const fs::path a = scratch("a.json"), b = scratch("b.json");
  ASSERT_EQ(run("verify prop2 --domain blob --seed 7 --out " + a.string()).code, 0);
  ASSERT_EQ(run("verify prop2 --domain blob --seed 7 --out " + b.string()).code, 0);
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST(Cli, DomainFromFile) {
  const fs::path p = scratch("disc.json");
  std::ofstream(p) << iml::dump_domain(iml::make_disc(0.0, 2.0, "big-disc"));
  const CliResult r = run("eval --domain " + p.string() + " --quantity caratheodory_gamma --at 1+0i");
  ASSERT_EQ(r.code, 0);
  const auto row = split(r.out.substr(r.out.find('\n') + 1));
  ASSERT_GE(row.size(), 4u);
  EXPECT_EQ(row[0], "big-disc");
  EXPECT_NEAR(std::stod(row[3]), 2.0 / 3.0, 1e-14);
}

TEST(Cli, CatalogListsDomains) {
  const CliResult r = run("catalog");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("blob-jordan"), std::string::npos);
}
