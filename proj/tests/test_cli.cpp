#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include "dualsvd/container_io.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using dualsvd::DualMatrix;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("dualsvd_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run_cli(const std::string& args) {
  std::string cmd = std::string(DUALSVD_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string run_cli_capture(const std::string& args, const fs::path& log) {
  std::string cmd =
      std::string(DUALSVD_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
  std::system(cmd.c_str());
  std::ifstream in(log);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

json load_json(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  return json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

// Validates a report against the checked-in schema subset: type, required,
// properties, items, enum. The report must also match its per-command
// definition.
bool validate(const json& schema, const json& value);

bool check_type(const std::string& type, const json& value) {
  if (type == "object") return value.is_object();
  if (type == "array") return value.is_array();
  if (type == "string") return value.is_string();
  if (type == "boolean") return value.is_boolean();
  if (type == "integer") return value.is_number_integer() || value.is_number_unsigned();
  if (type == "number") return value.is_number();
  return false;
}

bool validate(const json& schema, const json& value) {
  if (schema.contains("type") && !check_type(schema["type"], value)) return false;
  if (schema.contains("enum")) {
    bool any = false;
    for (const auto& option : schema["enum"]) any |= (option == value);
    if (!any) return false;
  }
  if (schema.contains("required")) {
    for (const auto& key : schema["required"]) {
      if (!value.contains(key.get<std::string>())) return false;
    }
  }
  if (schema.contains("properties") && value.is_object()) {
    for (const auto& [key, sub] : schema["properties"].items()) {
      if (value.contains(key) && !validate(sub, value[key])) return false;
    }
  }
  if (schema.contains("items") && value.is_array()) {
    for (const auto& item : value) {
      if (!validate(schema["items"], item)) return false;
    }
  }
  return true;
}

bool validate_report(const json& report) {
  static const json schema = load_json(DUALSVD_SCHEMA_PATH);
  if (!validate(json{{"type", "object"}, {"required", schema["required"]}}, report)) {
    return false;
  }
  std::string command = report["command"];
  const auto& defs = schema["definitions"];
  if (!defs.contains(command)) return false;
  if (!validate(defs[command], report)) return false;
  return validate(defs["config"], report["config"]);
}

}  // namespace

TEST_CASE("missing input exits with the I/O code") {
  CHECK(run_cli("cdsvd --input /nonexistent/thing --output /tmp/unused_out") == 3);
}

TEST_CASE("usage errors exit with code 1") {
  CHECK(run_cli("cdsvd") == 1);
  CHECK(run_cli("unknown-subcommand") == 1);
  CHECK(run_cli("") == 1);
}

TEST_CASE("pinv on the analytic 2x2 infeasible example exits 2 and prints the residual") {
  TempDir tmp;
  Eigen::MatrixXd as(2, 2), ai(2, 2);
  as << 1, 0, 0, 0;
  ai << 0, 0, 0, 1;
  dualsvd::write_container(DualMatrix::FromReal(as, ai), tmp.path / "bad");
  std::string log = run_cli_capture("pinv --input " + (tmp.path / "bad").string() +
                                        " --output " + (tmp.path / "out").string(),
                                    tmp.path / "log.txt");
  CHECK(run_cli("pinv --input " + (tmp.path / "bad").string() + " --output " +
                (tmp.path / "out").string()) == 2);
  CHECK(log.find("residual 1") != std::string::npos);
}

TEST_CASE("cdsvd round trip through the CLI") {
  TempDir tmp;
  auto eng = dualsvd::make_stream(91, 0);
  Eigen::VectorXd sig(3);
  sig << 3.0, 2.0, 1.0;
  DualMatrix a = testsup::feasible_dual(6, 4, sig, eng);
  dualsvd::write_container(a, tmp.path / "a");

  CHECK(run_cli("cdsvd --input " + (tmp.path / "a").string() + " --output " +
                (tmp.path / "fact").string()) == 0);

  DualMatrix u = dualsvd::read_container(tmp.path / "fact" / "U");
  DualMatrix s = dualsvd::read_container(tmp.path / "fact" / "Sigma");
  DualMatrix v = dualsvd::read_container(tmp.path / "fact" / "V");
  CHECK(testsup::rep_reconstruction_residual(a, u, s, v) <= 1e-10);

  json report = load_json(tmp.path / "fact" / "cdsvd.json");
  CHECK(report["rank"] == 3);
  CHECK(validate_report(report));
}

TEST_CASE("lowrank and pinv CLI reports validate against the schema") {
  TempDir tmp;
  auto eng = dualsvd::make_stream(92, 0);
  Eigen::VectorXd sig(3);
  sig << 3.0, 2.0, 1.0;
  DualMatrix a = testsup::feasible_dual(6, 4, sig, eng);
  dualsvd::write_container(a, tmp.path / "a");

  CHECK(run_cli("lowrank --input " + (tmp.path / "a").string() + " -k 2 --output " +
                (tmp.path / "lr").string()) == 0);
  json lr = load_json(tmp.path / "lr.json");
  CHECK(lr["k"] == 2);
  CHECK(validate_report(lr));
  DualMatrix approx = dualsvd::read_container(tmp.path / "lr");
  CHECK(approx.rows() == 6);

  CHECK(run_cli("pinv --input " + (tmp.path / "a").string() + " --output " +
                (tmp.path / "pi").string()) == 0);
  json pi = load_json(tmp.path / "pi.json");
  CHECK(validate_report(pi));
  DualMatrix pinv = dualsvd::read_container(tmp.path / "pi");
  CHECK(pinv.rows() == 4);
  CHECK(pinv.cols() == 6);

  CHECK(run_cli("lowrank --input " + (tmp.path / "a").string() + " -k 99 --output " +
                (tmp.path / "nope").string()) == 1);
}

TEST_CASE("simulate is byte-deterministic for a fixed seed") {
  TempDir tmp;
  std::string flags =
      " --grid 20x20 --frames 40 --dt 1 --noise-snr 0.5 --seed 7"
      " --standing 5,5,2,0.9,1 --traveling 4,4,15,15,2,0.7,0.8";
  CHECK(run_cli("simulate" + flags + " --output " + (tmp.path / "one.csv").string()) == 0);
  CHECK(run_cli("simulate" + flags + " --output " + (tmp.path / "two.csv").string()) == 0);
  CHECK(slurp(tmp.path / "one.csv") == slurp(tmp.path / "two.csv"));
  CHECK_FALSE(slurp(tmp.path / "one.csv").empty());

  // container output carries the dual pair
  CHECK(run_cli("simulate" + flags + " --output " + (tmp.path / "dual").string()) == 0);
  DualMatrix d = dualsvd::read_container(tmp.path / "dual");
  CHECK(d.rows() == 400);
  CHECK(d.cols() == 39);
}

TEST_CASE("waves detect and rank pipelines run end to end") {
  TempDir tmp;
  std::string sim =
      "simulate --grid 24x24 --frames 120 --dt 1"
      " --standing 5,5,2,0.47519867390082254,1.0 --standing 18,18,2,1.0559970531129389,0.9"
      " --traveling 6,17,17,6,2,0.7603178782413161,0.85 --output " +
      (tmp.path / "series.csv").string();
  REQUIRE(run_cli(sim) == 0);

  CHECK(run_cli("waves detect --input " + (tmp.path / "series.csv").string() +
                " --derive first-diff --dt 1 -K 4 --grid 24x24 --report " +
                (tmp.path / "detect.json").string() + " --extract-pair 2,3 --movie " +
                (tmp.path / "movie").string()) == 0);
  json detect = load_json(tmp.path / "detect.json");
  CHECK(validate_report(detect));
  CHECK(detect["rank"].get<int>() == 4);
  REQUIRE(detect["pairs"].size() >= 1);
  int standing_count = 0;
  for (const auto& cls : detect["classification"]) {
    standing_count += (cls.get<std::string>() == "standing");
  }
  CHECK(standing_count == 2);
  CHECK(fs::exists(tmp.path / "movie.csv"));

  CHECK(run_cli("waves rank --input " + (tmp.path / "series.csv").string() +
                " --derive first-diff --dt 1 --report " +
                (tmp.path / "rank.json").string()) == 0);
  json rank = load_json(tmp.path / "rank.json");
  CHECK(validate_report(rank));
  CHECK(rank["estimated_rank"].get<int>() == 4);
}
