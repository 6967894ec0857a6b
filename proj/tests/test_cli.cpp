#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ddae_cli/commands.hpp"
#include "ddae_cli/io.hpp"
#include "json.hpp"

namespace {

namespace cli = ddae::cli;
namespace fs = std::filesystem;
using nlohmann::json;

const fs::path kData = DDAE_DATA_DIR;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

// Runs the installed-layout binary; stdout captured through a pipe, stderr
// through a temporary file.
Run ddae(const std::string& args) {
  const fs::path err_file = fs::temp_directory_path() / ("ddae_cli_err_" + std::to_string(::getpid()));
  const std::string cmd = std::string("\"") + DDAE_CLI_PATH + "\" " + args + " 2>\"" + err_file.string() + "\"";
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t got = 0;
  while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(err_file);
  std::stringstream ss;
  ss << in.rdbuf();
  r.err = ss.str();
  fs::remove(err_file);
  return r;
}

std::string data(const char* name) { return "\"" + (kData / name).string() + "\""; }

fs::path temp_file(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << content;
  return p;
}

struct CsvMax {
  std::string header;
  double at = 0.0, value = -1.0;
  std::size_t rows = 0;
};

CsvMax csv_max(const std::string& csv) {
  std::istringstream in(csv);
  CsvMax m;
  std::getline(in, m.header);
  std::string line;
  while (std::getline(in, line)) {
    ++m.rows;
    const auto comma = line.find(',');
    const double v = std::stod(line.substr(comma + 1));
    if (v > m.value) m.value = v, m.at = std::stod(line.substr(0, comma));
  }
  return m;
}

TEST(CliCheck, SysAPasses) {
  const auto r = ddae("check " + data("sys_a.json"));
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("gamma_a = 0.75"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("rank(E) = 1"), std::string::npos);
  EXPECT_NE(r.out.find("result: pass"), std::string::npos);
}

TEST(CliCheck, JsonReport) {
  const auto r = ddae("check --json " + data("sys_b.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["rank_E"], 1);
  EXPECT_EQ(j["nu"], 1);
  EXPECT_TRUE(j["assumption1_ok"].get<bool>());
  EXPECT_NEAR(j["gamma_a"].get<double>(), 0.5625, 1e-12);
  EXPECT_TRUE(j["passed"].get<bool>());
}

TEST(CliCheck, ZeroSystemFailsAssumption1) {
  const auto p = temp_file("ddae_zero.json", R"({"n": 2, "delays": [], "E": [[0, 0], [0, 0]],
    "A": [[[0, 0], [0, 0]]], "B": [[1], [0]], "C": [[1, 0]]})");
  std::ostringstream out, err;
  EXPECT_NE(cli::run_check({p, true, 0}, out, err), 0);
  const auto j = json::parse(out.str());
  EXPECT_FALSE(j["assumption1_ok"].get<bool>());
  EXPECT_TRUE(j["gamma_a"].is_null());
  fs::remove(p);
}

TEST(CliCheck, OdeIsVacuous) {
  const auto p = temp_file("ddae_ode.json", R"({"n": 1, "delays": [1], "E": [[1]], "A": [[[-2]], [[0.5]]],
    "B": [[1]], "C": [[1]]})");
  std::ostringstream out, err;
  EXPECT_EQ(cli::run_check({p, false, 0}, out, err), 0) << err.str();
  EXPECT_NE(out.str().find("vacuous"), std::string::npos) << out.str();
  fs::remove(p);
}

TEST(CliCheck, UnstableDifferencePartFails) {
  auto doc = cli::read_system_file(kData / "sys_a.json");
  std::vector<ddae::Matrix> A = doc.system.A();
  A[1](1, 1) = 0.75;
  doc.system = ddae::DdaeSystem(doc.system.E(), A, doc.system.B(), doc.system.C(), doc.system.delays());
  const auto p = temp_file("ddae_c075.json", cli::dump_system(doc));
  std::ostringstream out, err;
  EXPECT_EQ(cli::run_check({p, false, 0}, out, err), cli::kExitNumerical);
  EXPECT_NE(out.str().find("gamma_a = 1.25"), std::string::npos) << out.str();
  fs::remove(p);
}

TEST(CliCheck, SchemaErrorIsUsage) {
  const auto p = temp_file("ddae_bad.json", R"({"n": 2, "delays": [1], "E": [[1, 0], [0, 0]],
    "A": [[[0, 1], [-1, -1]], [[0, 0], [0, "x"]]], "B": [[0], [1]], "C": [[2, 1]]})");
  const auto r = ddae("check \"" + p.string() + "\"");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("/A/1/1/1"), std::string::npos) << r.err;
  fs::remove(p);

  const auto s = temp_file("ddae_syntax.json", "{\n  \"n\": 2,\n  oops\n}\n");
  const auto q = ddae("check \"" + s.string() + "\"");
  EXPECT_EQ(q.code, 1);
  EXPECT_NE(q.err.find(":3:"), std::string::npos) << q.err;
  fs::remove(s);

  EXPECT_EQ(ddae("check /nonexistent/file.json").code, 1);
}

TEST(CliUsage, ParseErrorsAndHelp) {
  EXPECT_EQ(ddae("").code, 1);
  EXPECT_EQ(ddae("frobnicate").code, 1);
  EXPECT_EQ(ddae("sweep").code, 1);
  EXPECT_EQ(ddae("sweep " + data("sys_a.json") + " --which X --grid lin:0:1:3").code, 1);
  const auto h = ddae("--help");
  EXPECT_EQ(h.code, 0);
  EXPECT_NE(h.out.find("sweep"), std::string::npos);
}

TEST(CliSweep, SysAPlainCurve) {
  const auto r = ddae("sweep " + data("sys_a.json") + " --which T --grid lin:0:5:2001");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = csv_max(r.out);
  EXPECT_EQ(m.header, "omega,sigma_1");
  EXPECT_EQ(m.rows, 2001u);
  EXPECT_NEAR(m.value, 2.6422, 1e-3);
  EXPECT_NEAR(m.at, 1.66, 1e-2);
}

TEST(CliSweep, SysAAsymptoticCurve) {
  const auto r = ddae("sweep " + data("sys_a.json") + " --which Ta --grid lin:0:6.283185307179586:2001");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(csv_max(r.out).value, 2.0320, 1e-3);
}

TEST(CliSweep, InvalidGridIsUsage) {
  for (const char* g : {"lin:5:0:10", "lin:1:1:10", "lin:0:1", "log:0:1:10", "x:0:1:3"}) {
    const auto r = ddae("sweep " + data("sys_a.json") + " --grid " + g);
    EXPECT_EQ(r.code, 1) << g;
    EXPECT_FALSE(r.err.empty());
  }
  EXPECT_EQ(ddae("sweep " + data("sys_a.json")).code, 1);
  EXPECT_EQ(ddae("sweep " + data("sys_a.json") + " --which T --torus 8").code, 1);
}

TEST(CliSweep, FileOutputAndJson) {
  const fs::path csv = fs::temp_directory_path() / "ddae_sweep.csv";
  const fs::path js = fs::temp_directory_path() / "ddae_sweep.json";
  const auto a = ddae("sweep " + data("sys_a.json") + " --grid lin:0:5:101 --out \"" + csv.string() + "\"");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_NE(a.out.find("max sigma_1"), std::string::npos);
  const auto b = ddae("sweep " + data("sys_a.json") + " --grid lin:0:5:101 --out \"" + js.string() + "\"");
  ASSERT_EQ(b.code, 0) << b.err;
  const auto j = json::parse(cli::read_text_file(js));
  EXPECT_EQ(j["samples"].size(), 101u);
  EXPECT_EQ(j["grid"], "lin:0:5:101");
  const auto c = ddae("sweep " + data("sys_a.json") + " --grid lin:0:5:101");
  EXPECT_EQ(cli::read_text_file(csv), c.out);
  fs::remove(csv);
  fs::remove(js);
}

TEST(CliSweep, DelayOverrideAndTorus) {
  std::ostringstream o1, o2, err;
  cli::SweepArgs a;
  a.file = kData / "sys_a.json";
  a.grid = "lin:0:5:11";
  a.delays = ddae::Delays{0.99, 2.0};
  ASSERT_EQ(cli::run_sweep(a, o1, err), 0) << err.str();
  const auto r = ddae("sweep " + data("sys_a.json") + " --grid lin:0:5:11 --delays 0.99,2");
  EXPECT_EQ(r.out, o1.str());
  EXPECT_NE(r.out, ddae("sweep " + data("sys_a.json") + " --grid lin:0:5:11").out);
  EXPECT_EQ(ddae("sweep " + data("sys_a.json") + " --grid lin:0:5:11 --delays 1").code, 1);

  const auto t = ddae("sweep " + data("sys_a.json") + " --which Ta --torus 4");
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_EQ(t.out.substr(0, t.out.find('\n')), "theta_1,theta_2,sigma_1");
  std::size_t lines = 0;
  for (char ch : t.out) lines += ch == '\n';
  EXPECT_EQ(lines, 17u);
}

TEST(CliSweep, Deterministic) {
  const std::string cmd = "sweep " + data("sys_b.json") + " --grid log:0.01:100:3001";
  EXPECT_EQ(ddae(cmd).out, ddae("--threads 1 " + cmd).out);
}

TEST(CliNorm, StrongTaJson) {
  const auto r = ddae("norm " + data("sys_b.json") + " --kind strong-ta --json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["value"].get<double>(), 16.0 / 7.0, 1e-9);
  EXPECT_EQ(j["branch"], "asymptotic-Ta");
}

TEST(CliNorm, SysAStrongIsFour) {
  const auto r = ddae("norm " + data("sys_a.json") + " --kind strong");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("value: 4.0"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("branch: asymptotic-Ta"), std::string::npos);
}

TEST(CliNorm, SysAHinf) {
  const auto r = ddae("norm " + data("sys_a.json") + " --kind hinf --json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["value"].get<double>(), 2.6422, 1e-3);
  EXPECT_NEAR(j["attained_at"]["omega"].get<double>(), 1.6598, 1e-2);
  EXPECT_EQ(j["branch"], "plain-T");
}

TEST(CliNorm, SysBStrongIsPlain) {
  const auto r = ddae("norm " + data("sys_b.json") + " --kind strong --json");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["branch"], "plain-T");
}

TEST(CliNorm, FailuresMapToExitCodes) {
  auto doc = cli::read_system_file(kData / "sys_a.json");
  std::vector<ddae::Matrix> A = doc.system.A();
  A[1](1, 1) = 0.5;  // torus matrix singular at theta = 0
  A[2](1, 1) = 0.5;
  doc.system = ddae::DdaeSystem(doc.system.E(), A, doc.system.B(), doc.system.C(), doc.system.delays());
  const auto p = temp_file("ddae_unbounded.json", cli::dump_system(doc));
  const auto r = ddae("norm \"" + p.string() + "\" --kind strong-ta");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("unbounded"), std::string::npos) << r.err;
  fs::remove(p);

  const auto integ = temp_file("ddae_integ.json", R"({"n": 1, "delays": [], "E": [[1]], "A": [[[0]]],
    "B": [[1]], "C": [[1]]})");
  EXPECT_EQ(ddae("norm \"" + integ.string() + "\" --kind hinf").code, 2);
  fs::remove(integ);

  EXPECT_EQ(ddae("norm " + data("sys_a.json") + " --kind hinf --tol 0").code, 1);
  EXPECT_EQ(ddae("norm " + data("sys_a.json") + " --kind bogus").code, 1);
}

TEST(CliPerturb, SysAFindsTheJump) {
  const auto r = ddae("perturb " + data("sys_a.json") + " --epsilon 0.02 --count 2 --format json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(r.out);
  ASSERT_EQ(j["records"].size(), 2u);
  EXPECT_EQ(j["records"][1]["tau"], json({0.99, 2.0}));
  EXPECT_NEAR(j["records"][1]["hinf"].get<double>(), 3.9993, 1e-3);
  EXPECT_NEAR(j["max_hinf"].get<double>(), 3.9993, 1e-3);
}

TEST(CliPerturb, SysBIsContinuous) {
  const auto r = ddae("perturb " + data("sys_b.json") + " --epsilon 0.01 --count 3");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "tau_1,tau_2,hinf,peak_omega,status");
  std::vector<double> values;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string t1, t2, h;
    std::getline(ss, t1, ',');
    std::getline(ss, t2, ',');
    std::getline(ss, h, ',');
    values.push_back(std::stod(h));
    EXPECT_EQ(line.substr(line.rfind(',') + 1), "ok");
  }
  ASSERT_EQ(values.size(), 3u);
  for (double v : values) EXPECT_NEAR(v, values[0], 0.01 * values[0]);
}

TEST(CliPerturb, UsageErrors) {
  EXPECT_EQ(ddae("perturb " + data("sys_a.json") + " --epsilon 0").code, 1);
  EXPECT_EQ(ddae("perturb " + data("sys_a.json") + " --epsilon -1").code, 1);
  EXPECT_EQ(ddae("perturb " + data("sys_a.json")).code, 1);
  EXPECT_EQ(ddae("perturb " + data("sys_a.json") + " --epsilon 0.1 --scheme nope").code, 1);
  EXPECT_EQ(ddae("perturb " + data("sys_a.json") + " --epsilon 0.1 --count 0").code, 1);
}

TEST(CliBuild, ExampleOneRoundTripsThroughCheck) {
  const fs::path out = fs::temp_directory_path() / "ddae_example1.json";
  const auto b = ddae("build " + data("example1_feedback.json") + " --out \"" + out.string() + "\"");
  ASSERT_EQ(b.code, 0) << b.err;
  const auto doc = cli::read_system_file(out);
  EXPECT_EQ(doc.system.n(), 3);
  const auto c = ddae("check \"" + out.string() + "\"");
  EXPECT_EQ(c.code, 0) << c.out << c.err;
  fs::remove(out);
}

TEST(CliBuild, NeutralExampleMatchesGoldenBytes) {
  const auto r = ddae("build " + data("example4_neutral.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, cli::read_text_file(kData / "example4_neutral.golden.json"));
}

TEST(CliBuild, PassThroughAndEmptySteps) {
  const auto sys = temp_file("ddae_passthrough.json",
                             "{\"system\": " + cli::read_text_file(kData / "sys_a.json") + ", \"steps\": []}");
  const auto r = ddae("build \"" + sys.string() + "\"");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, cli::read_text_file(kData / "sys_a.json"));
  fs::remove(sys);

  const auto plant = temp_file("ddae_plant.json", R"({"plant": {"A": [[-1, 0], [0, -2]], "B1": [[1], [0]],
    "B2": [[0], [1]], "C": [[1, 1]], "D1": [[0]], "F": [[1, 0]]}, "steps": []})");
  const auto q = ddae("build \"" + plant.string() + "\"");
  ASSERT_EQ(q.code, 0) << q.err;
  const auto doc = cli::system_from_json(cli::parse_json_text(q.out, "stdout"));
  EXPECT_EQ(doc.system.E(), ddae::Matrix::Identity(2, 2));
  EXPECT_EQ(doc.system.m(), 0);
  fs::remove(plant);

  const auto bad = temp_file("ddae_badbuild.json", R"({"steps": [{"op": "nope"}]})");
  EXPECT_EQ(ddae("build \"" + bad.string() + "\"").code, 1);
  fs::remove(bad);
}

}  // namespace
