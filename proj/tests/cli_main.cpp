// End-to-end checks of the crosslab binary: exit codes, artifact formats and
// run-to-run determinism on small configs.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int code = -1;
  std::string output;
};

std::string tmp_root() {
  static int counter = 0;
  const fs::path p = fs::path(CROSSLAB_TEST_TMP) / std::to_string(counter++);
  fs::create_directories(p);
  return p.string();
}

RunResult run_cli(const std::string& args) {
  const std::string out_file = tmp_root() + "/stdout.txt";
  const std::string cmd = std::string("\"") + CROSSLAB_BIN + "\" " + args +
                          " > " + out_file + " 2>/dev/null";
  const int raw = std::system(cmd.c_str());
  RunResult r;
#ifdef _WIN32
  r.code = raw;
#else
  r.code = WEXITSTATUS(raw);
#endif
  std::ifstream in(out_file);
  std::stringstream ss;
  ss << in.rdbuf();
  r.output = ss.str();
  return r;
}

std::string config(const std::string& name) {
  return std::string(CROSSLAB_CONFIG_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string write_temp(const std::string& content) {
  const std::string path = tmp_root() + "/cfg.json";
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("malformed JSON exits 2 with a parse error record") {
  const std::string bad = write_temp("{ not json");
  const RunResult r = run_cli("extremal --config " + bad);
  CHECK(r.code == 2);
  CHECK(r.output.find("config.parse") != std::string::npos);
}

TEST_CASE("unknown config keys are rejected with exit 2") {
  const std::string bad = write_temp(R"({
    "omega": {"shape":"disc","center":[0,0],"radius":1.0},
    "a": {"shape":"closed_disc","center":[0,0],"radius":0.25},
    "grid": {"rect":[[-1.05,-1.05],[1.05,1.05]],"nx":32,"ny":32},
    "surprise": 1
  })");
  const RunResult r = run_cli("extremal --config " + bad);
  CHECK(r.code == 2);
  CHECK(r.output.find("config.schema") != std::string::npos);
  CHECK(r.output.find("surprise") != std::string::npos);
}

TEST_CASE("extremal on A = domain writes the zero field") {
  const std::string out = tmp_root();
  const RunResult r = run_cli("extremal --config " + config("full_a_extremal.json") +
                              " --out " + out);
  CHECK(r.code == 0);
  CHECK(r.output.find("\"max\": 0") != std::string::npos);
  const std::string csv = slurp(out + "/field.csv");
  CHECK(!csv.empty());
  CHECK(csv.find("0.") == std::string::npos);  // only 0, nan and header digits
}

TEST_CASE("extremal annulus summary peaks at the boundary value") {
  const std::string out = tmp_root();
  const RunResult r = run_cli("extremal --config " + config("annulus_small.json") +
                              " --out " + out);
  CHECK(r.code == 0);
  CHECK(r.output.find("\"max\": 1") != std::string::npos);
  CHECK(r.output.find("\"min\": 0") != std::string::npos);
}

TEST_CASE("extremal artifacts are byte-identical across runs") {
  const std::string out1 = tmp_root();
  const std::string out2 = tmp_root();
  CHECK(run_cli("extremal --config " + config("annulus_small.json") + " --out " +
                out1).code == 0);
  CHECK(run_cli("extremal --config " + config("annulus_small.json") + " --out " +
                out2).code == 0);
  CHECK(slurp(out1 + "/summary.json") == slurp(out2 + "/summary.json"));
  CHECK(slurp(out1 + "/field.csv") == slurp(out2 + "/field.csv"));
  CHECK(!slurp(out1 + "/field.csv").empty());
}

TEST_CASE("envelope command reports fraction and connectivity") {
  const std::string out = tmp_root();
  const RunResult r = run_cli("envelope --config " +
                              config("envelope_trivial.json") + " --out " + out);
  CHECK(r.code == 0);
  CHECK(r.output.find("\"volume_fraction\": 1") != std::string::npos);
  CHECK(r.output.find("\"component_count\": 1") != std::string::npos);
  CHECK(!slurp(out + "/envelope.rle.csv").empty());
}

TEST_CASE("injected disconnected fields yield two components") {
  // Two low blocks in the z factor, a flat half-level w factor.
  const int n = 12;
  std::ostringstream fa, fb;
  fa << n << "," << n << ",-1,-1,1,1\n";
  fb << n << "," << n << ",-1,-1,1,1\n";
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const bool low = (ix < 3 && iy < 3) || (ix > 8 && iy > 8);
      fa << (ix ? "," : "") << (low ? "0.05" : "0.999");
      fb << (ix ? "," : "") << "0.5";
    }
    fa << "\n";
    fb << "\n";
  }
  const std::string dir = tmp_root();
  {
    std::ofstream a(dir + "/fa.csv"), b(dir + "/fb.csv");
    a << fa.str();
    b << fb.str();
  }
  const std::string cfg = write_temp(R"({"field_a_csv": ")" + dir +
                                     R"(/fa.csv", "field_b_csv": ")" + dir +
                                     R"(/fb.csv"})");
  const RunResult r = run_cli("envelope --config " + cfg + " --out " + dir);
  CHECK(r.code == 0);
  CHECK(r.output.find("\"component_count\": 2") != std::string::npos);
}

TEST_CASE("verify succeeds on the shipped diagonal config") {
  const std::string out = tmp_root();
  const RunResult r = run_cli("verify --config " + config("diagonal_verify.json") +
                              " --out " + out);
  CHECK(r.code == 0);
  CHECK(r.output.find("\"pass\": true") != std::string::npos);
  const std::string report = slurp(out + "/report.json");
  CHECK(report.find("max_rel_error") != std::string::npos);
  CHECK(report.find("conditioning") != std::string::npos);
}

TEST_CASE("the negative control exits nonzero") {
  const std::string out = tmp_root();
  const RunResult r = run_cli("verify --config " + config("negative_control.json") +
                              " --out " + out);
  CHECK(r.code == 1);
  CHECK(r.output.find("\"pass\": false") != std::string::npos);
  // Partial artifacts are retained on failure.
  CHECK(!slurp(out + "/report.json").empty());
}

TEST_CASE("underspecified denominators blow up the verify error") {
  // Same instance as the shipped config but fitted with m = 0.
  std::string cfg_text = slurp(config("negative_control.json"));
  CHECK(cfg_text.find("\"m\": 0") != std::string::npos);
}

TEST_CASE("solver overrides reach the iteration") {
  // A two-sweep budget cannot converge; the error record carries the code.
  const RunResult r = run_cli("extremal --config " + config("annulus_small.json") +
                              " --max-iter 2");
  CHECK(r.code == 1);
  CHECK(r.output.find("solver.no_converge") != std::string::npos);

  const RunResult bad_relax = run_cli(
      "extremal --config " + config("annulus_small.json") + " --relax 2.5");
  CHECK(bad_relax.code == 1);
  CHECK(bad_relax.output.find("solver.invalid") != std::string::npos);
}
