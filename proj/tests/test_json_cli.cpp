#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <doctest.h>
#include <json.hpp>

#include "leafwise/json_io.hpp"
#include "oracle.hpp"

using leafwise::Complex;
using leafwise::FourierSeries;
using leafwise::make_freq;
using nlohmann::json;
namespace io = leafwise::io;

namespace {

namespace fs = std::filesystem;

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("leafwise-cli-tests-" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

// Runs the installed binary from inside the scratch directory so default
// manifests land there, capturing exit code and both streams.
int run_cli(const std::string& args, std::string* out_text = nullptr,
            std::string* err_text = nullptr) {
  const fs::path so = work_dir() / "last-stdout.txt";
  const fs::path se = work_dir() / "last-stderr.txt";
  const std::string cmd = "cd " + work_dir().string() + " && " +
                          std::string(LEAFWISE_CLI_PATH) + " " + args + " > " +
                          so.string() + " 2> " + se.string();
  const int status = std::system(cmd.c_str());
  if (out_text != nullptr) *out_text = slurp(so);
  if (err_text != nullptr) *err_text = slurp(se);
  if (WIFEXITED(status)) return WEXITSTATUS(status);
  return -1;
}

const char* kGoldenRowJson = "[[1,0.6180339887498949]]";

}  // namespace

TEST_SUITE("json_cli") {

TEST_CASE("series json round trip is byte identical and drops dust") {
  FourierSeries f(2);
  f.set(make_freq({0, 0}), Complex{0.5, 0.0});
  f.set_pair(make_freq({1, -1}), Complex{0.25, -0.125});
  f.set_pair(make_freq({2, 0}), Complex{1e-16, 0.0});  // below the write floor

  const json j1 = io::series_to_json(f);
  CHECK(j1["dims"] == 2);
  CHECK(j1["real"] == true);
  CHECK(j1["coeffs"].size() == 3);  // the 1e-16 pair is not written

  const FourierSeries g = io::series_from_json(j1);
  const json j2 = io::series_to_json(g);
  CHECK(j1.dump() == j2.dump());
  CHECK(leafwise::coeff_distance(f, g) <= 1e-15);
}

TEST_CASE("real series without mirror modes are rejected") {
  const json bad = json::parse(
      R"({"dims":1,"real":true,"coeffs":[{"m":[1],"re":0.1,"im":0.0}]})");
  try {
    io::series_from_json(bad);
    FAIL("expected a schema error");
  } catch (const io::SchemaError& e) {
    CHECK(e.pointer() == "$.coeffs");
  }
}

TEST_CASE("algebra json round trip preserves table and realization") {
  const leafwise::LieAlgebra heis = leafwise::LieAlgebra::heisenberg();
  const json j1 = io::algebra_to_json(heis);
  const leafwise::LieAlgebra back = io::algebra_from_json(j1);
  CHECK(back.n == 3);
  CHECK((back.table - heis.table).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(back.rep.size() == 3);
  for (int i = 0; i < 3; ++i)
    CHECK((back.rep[i] - heis.rep[i]).cwiseAbs().maxCoeff() == 0.0);
  CHECK(io::algebra_to_json(back).dump() == j1.dump());
}

TEST_CASE("schema errors carry json pointers") {
  try {
    io::series_from_json(json::object());
    FAIL("expected a schema error");
  } catch (const io::SchemaError& e) {
    CHECK(e.pointer() == "$.dims");
  }

  const json swapped = json::parse(
      R"({"n":3,"c":[{"i":2,"j":1,"k":3,"val":1.0}]})");
  try {
    io::algebra_from_json(swapped);
    FAIL("expected a schema error");
  } catch (const io::SchemaError& e) {
    CHECK(e.pointer() == "$.c[0].i");
    CHECK(std::string(e.what()).find("mirror term") != std::string::npos);
  }

  try {
    io::matrix_from_json(json::parse("[[1,2],[3]]"));
    FAIL("expected a schema error");
  } catch (const io::SchemaError& e) {
    CHECK(e.pointer() == "$[1]");
  }
}

TEST_CASE("frozen fnv1a digests") {
  CHECK(io::fnv1a_hex("") == "cbf29ce484222325");
  CHECK(io::fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(io::fnv1a_hex("hello") == "a430d84680aabd0b");
  CHECK(io::fnv1a_hex("[[2,1],[1,1]]") == "a01a815ad069f710");
}

TEST_CASE("doubles print with seventeen significant digits") {
  CHECK(io::format_double(0.1) == "0.10000000000000001");
  CHECK(io::format_double(1.0 / 3.0) == "0.33333333333333331");
  CHECK(io::format_double(2.0) == "2");
  CHECK(io::format_double(0.25) == "0.25");
  CHECK(io::format_double(-1.5) == "-1.5");
}

TEST_CASE("offenders csv against a hand-written table") {
  leafwise::DiophantineReport rep;
  rep.tau_estimate = 1.0;
  rep.c_argmin = make_freq({3, 4});
  rep.offenders.push_back({make_freq({3, 4}), 0.25});
  rep.offenders.push_back({make_freq({0, 1}), 0.5});
  CHECK(io::offenders_csv(rep) ==
        "m1,m2,delta,delta_times_norm_tau\n"
        "3,4,0.25,1.25\n"
        "0,1,0.5,0.5\n");
}

TEST_CASE("cli: toral pipeline, manifest, and byte-identical reruns") {
  spit(work_dir() / "cat.json", "[[2,1],[1,1]]");
  const int code = run_cli("toral --matrix cat.json --out t1.json");
  CHECK(code == 0);

  const json rep = json::parse(slurp(work_dir() / "t1.json"));
  CHECK(rep["h1_dim"] == 1);
  CHECK(rep["det"] == 1);
  CHECK(rep["slope_quadratic_irrational"] == true);
  CHECK(std::abs(rep["lambda"].get<double>() - 2.618033988749895) <= 1e-12);

  const json man = json::parse(slurp(work_dir() / "t1.json.manifest.json"));
  for (const char* key :
       {"subcommand", "config", "inputs", "version", "duration_ms",
        "timestamp"})
    CHECK(man.contains(key));
  CHECK(man["subcommand"] == "toral");
  CHECK(man["inputs"].is_object());
  CHECK_FALSE(man["inputs"].empty());

  CHECK(run_cli("toral --matrix cat.json --out t2.json") == 0);
  CHECK(slurp(work_dir() / "t1.json") == slurp(work_dir() / "t2.json"));
}

TEST_CASE("cli: resonant right-hand side exits with the obstruction code") {
  spit(work_dir() / "resonant.json", R"({"dims":2,"real":true,"coeffs":[
    {"m":[-1,1],"re":0.15,"im":0.0},
    {"m":[1,-1],"re":0.15,"im":0.0}]})");
  const int code =
      run_cli("solve-cohomeq --field resonant.json --matrix '[[1,1]]' "
              "--out res.json");
  CHECK(code == 2);
  const json rep = json::parse(slurp(work_dir() / "res.json"));
  CHECK(rep["status"] == "obstructed");
  CHECK(rep["obstruction_modes"].size() == 2);
}

TEST_CASE("cli: reference registry lookups") {
  std::string out;
  CHECK(run_cli("refs --id weyl-chamber --out ref.json") == 0);
  const json rep = json::parse(slurp(work_dir() / "ref.json"));
  CHECK(rep["id"] == "weyl-chamber");
  CHECK(rep["statement"].get<std::string>().find("H^1(A_p)") !=
        std::string::npos);

  CHECK(run_cli("refs --id no-such-entry") == 1);

  CHECK(run_cli("refs", &out) == 0);
  const json all = json::parse(out);
  CHECK(all.is_array());
  CHECK(all.size() == 10);
}

TEST_CASE("cli: csv output starts with the offender header") {
  std::string out;
  const int code = run_cli(std::string("diophantine-scan --matrix '") +
                               kGoldenRowJson + "' --radius 5 --format csv",
                           &out);
  CHECK(code == 0);
  CHECK(out.rfind("m1,m2,delta,delta_times_norm_tau\n", 0) == 0);
}

TEST_CASE("cli: conjugation output feeds back as its own input") {
  spit(work_dir() / "fam.json", R"({"alpha":0.6180339887498949,
    "map":{"drift":0.6180339887498949,
           "periodic":{"dims":1,"real":true,"coeffs":[
             {"m":[-1],"re":0.001,"im":0.0},
             {"m":[1],"re":0.001,"im":0.0}]}}})");
  CHECK(run_cli("kam --family fam.json --steps 1 --out k1.json") == 0);
  const json k1 = json::parse(slurp(work_dir() / "k1.json"));
  CHECK(k1.contains("alpha"));
  CHECK(k1.contains("conjugated"));
  CHECK(k1["converged"] == true);

  // The conjugated map's rotation number sits a shade off the target (the
  // second-order shift of the perturbation), so rerunning against the same
  // alpha improves the residual but cannot reach another tenfold cut: the
  // inconclusive exit code is the honest answer.
  CHECK(run_cli("kam --family k1.json --steps 2 --out k2.json") == 3);
  const json k2 = json::parse(slurp(work_dir() / "k2.json"));
  CHECK(k2["converged"] == false);
  CHECK(k2["final_residual"].get<double>() <=
        k1["final_residual"].get<double>());

  // Refining the target to the conjugated map's own rotation number (drift
  // plus the mean left in the periodic part) lets the rerun converge.
  double mean = 0.0;
  for (const json& c : k1["conjugated"]["periodic"]["coeffs"])
    if (c["m"] == json::array({0})) mean = c["re"].get<double>();
  const double refined = k1["conjugated"]["drift"].get<double>() + mean;
  char aflag[64];
  std::snprintf(aflag, sizeof aflag, "--alpha %.17g", refined);
  CHECK(run_cli(std::string("kam --family k1.json --steps 2 ") + aflag +
                " --out k3.json") == 0);
  const json k3 = json::parse(slurp(work_dir() / "k3.json"));
  CHECK(k3["converged"] == true);
  CHECK(k3["final_residual"].get<double>() <=
        k2["final_residual"].get<double>());
}

TEST_CASE("cli: schema errors report the pointer on stderr") {
  std::string err;
  const int code = run_cli(
      "solve-cohomeq --field '{\"dims\":2}' --matrix '[[1,1]]'", nullptr,
      &err);
  CHECK(code == 1);
  CHECK(err.find("schema error") != std::string::npos);
  CHECK(err.find("$.") != std::string::npos);
}

TEST_CASE("cli: default manifest lands in the working directory") {
  fs::remove(work_dir() / "leafwise-run.manifest.json");
  const int code = run_cli(
      "rotation-number --map "
      "'{\"drift\":0.25,\"periodic\":{\"dims\":1,\"real\":true,\"coeffs\":[]}}'"
      " --iters 1000");
  CHECK(code == 0);
  const json man =
      json::parse(slurp(work_dir() / "leafwise-run.manifest.json"));
  CHECK(man["subcommand"] == "rotation-number");
}

TEST_CASE("cli: missing subcommand is a usage error") {
  CHECK(run_cli("") == 1);
  CHECK(run_cli("no-such-subcommand") == 1);
}

}  // TEST_SUITE
