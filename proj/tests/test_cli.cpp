#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include <json.hpp>

using json = nlohmann::json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
};

std::string cli_path() {
  const char* p = std::getenv("MAXLSH_CLI");
  REQUIRE(p != nullptr);
  return p;
}

std::string tmp_dir() {
  const char* p = std::getenv("MAXLSH_TEST_TMP");
  return p ? p : "/tmp";
}

CliResult run_cli(const std::string& args, const std::string& env = "") {
  CliResult res;
  const std::string cmd = env + " " + cli_path() + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe)) res.out.append(buf, got);
  const int status = pclose(pipe);
  res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return res;
}

std::string write_tmp(const std::string& name, const std::string& content) {
  const std::string path = tmp_dir() + "/" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

json strip_timing(json doc) {
  doc.erase("wall_time_ms");
  return doc;
}

}  // namespace

TEST_CASE("gen theorem2 emits the reference CSV", "[cli]") {
  const std::string path = tmp_dir() + "/cli_t4.csv";
  auto res = run_cli("gen theorem2 --n 4 --out " + path);
  REQUIRE(res.exit_code == 0);
  std::ifstream in(path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  REQUIRE(content == "1,-1,1,1\n-1,1,1,1\n1,1,1,-1\n1,1,-1,1\n");
}

TEST_CASE("ratio on the zero matrix", "[cli]") {
  const std::string path = write_tmp("cli_zero3.csv", "0,0,0\n0,0,0\n0,0,0\n");
  auto res = run_cli("ratio --input " + path + " --k 2");
  REQUIRE(res.exit_code == 0);
  json doc = json::parse(res.out);
  REQUIRE(doc["status"] == "ok");
  REQUIRE(doc["results"]["value"] == 0.0);
  REQUIRE(doc["schema"] == 1);
}

TEST_CASE("enumeration cap surfaces as too-large", "[cli]") {
  const std::string path = write_tmp("cli_id4.csv", "1,0,0,0\n0,1,0,0\n0,0,1,0\n0,0,0,1\n");
  auto res = run_cli("ratio --input " + path + " --k 8 --cap 1000");
  REQUIRE(res.exit_code == 2);
  json doc = json::parse(res.out);
  REQUIRE(doc["status"] == "too-large");
}

TEST_CASE("malformed csv is a usage error", "[cli]") {
  const std::string path = write_tmp("cli_bad.csv", "1,2\n3,oops\n");
  auto res = run_cli("maxnorm --input " + path);
  REQUIRE(res.exit_code == 64);
  auto ragged = run_cli("maxnorm --input " + write_tmp("cli_ragged.csv", "1,2\n3\n"));
  REQUIRE(ragged.exit_code == 64);
}

TEST_CASE("unknown flags are usage errors", "[cli]") {
  auto res = run_cli("maxnorm --no-such-flag 1");
  REQUIRE(res.exit_code == 64);
}

TEST_CASE("runs replay identically for a fixed seed", "[cli]") {
  const std::string path = tmp_dir() + "/cli_gram.csv";
  REQUIRE(run_cli("gen gram --n 5 --d 3 --seed 9 --out " + path).exit_code == 0);
  auto a = run_cli("alsh verify --input " + path + " --samples 2000 --seed 11");
  auto b = run_cli("alsh verify --input " + path + " --samples 2000 --seed 11");
  REQUIRE(a.exit_code == 0);
  REQUIRE(strip_timing(json::parse(a.out)) == strip_timing(json::parse(b.out)));
}

TEST_CASE("alsh build reports the sampler parameters", "[cli]") {
  const std::string path = write_tmp("cli_kappa.csv", "1,1,-1\n1,1,-1\n-1,-1,1\n");
  auto res = run_cli("alsh build --input " + path + " --seed 5");
  REQUIRE(res.exit_code == 0);
  json doc = json::parse(res.out);
  const double alpha = doc["results"]["alpha"];
  REQUIRE(alpha > 1.78);
  REQUIRE(alpha < 1.79);
  REQUIRE(doc["results"]["theta"] == 0.0);
  REQUIRE(doc["results"]["exact_zero"] == false);
}

TEST_CASE("check reports infeasibility with a certificate", "[cli]") {
  // Gram of three vectors with an obtuse apex
  const double s = 1.0 / std::sqrt(2.0);
  char buf[256];
  std::snprintf(buf, sizeof(buf), "1,0,%.17g\n0,1,%.17g\n%.17g,%.17g,1\n", s, s, s, s);
  const std::string path = write_tmp("cli_obtuse.csv", buf);
  auto res = run_cli("check --input " + path);
  REQUIRE(res.exit_code == 0);
  json doc = json::parse(res.out);
  REQUIRE(doc["results"]["triangle_ok"] == false);
  REQUIRE(doc["results"]["cut_cone_status"] == "infeasible");
  REQUIRE(doc["results"].contains("obtuse_triple"));
}

TEST_CASE("randexp writes per-trial statistics", "[cli]") {
  const std::string csv = tmp_dir() + "/cli_trials.csv";
  auto res = run_cli("randexp metric --n 4 --d 8 --trials 20 --seed 3 --per-trial-csv " + csv);
  REQUIRE(res.exit_code == 0);
  json doc = json::parse(res.out);
  REQUIRE(doc["results"]["fraction"].is_number());
  std::ifstream in(csv);
  int lines = 0;
  std::string line;
  while (std::getline(in, line)) ++lines;
  REQUIRE(lines == 20);
}

TEST_CASE("seed falls back to the environment variable", "[cli]") {
  const std::string path = write_tmp("cli_seed.csv", "1,-1\n-1,1\n");
  auto res = run_cli("maxnorm --input " + path, "MAXLSH_SEED=777");
  REQUIRE(res.exit_code == 0);
  REQUIRE(json::parse(res.out)["seed"] == 777);
}

TEST_CASE("verify-theorem1 smoke run", "[cli]") {
  auto res = run_cli("verify-theorem1 --corpus random --count 2 --size 3 --seed 1");
  REQUIRE(res.exit_code == 0);
  json doc = json::parse(res.out);
  REQUIRE(doc["results"]["all_hold"] == true);
  REQUIRE(doc["results"]["per_matrix"].size() == 2);
}
