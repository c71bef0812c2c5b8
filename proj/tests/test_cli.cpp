#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("stabcert_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Run run(const std::string& args, const std::string& env = "") {
  const fs::path out = scratch() / "stdout.txt";
  const fs::path err = scratch() / "stderr.txt";
  const std::string cmd = env + " '" + std::string(STABCERT_BIN) + "' " + args + " >'" + out.string() + "' 2>'" +
                          err.string() + "'";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::string data(const std::string& name) { return "'" + std::string(STABCERT_SOURCE_DIR) + "/data/" + name + "'"; }

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p, std::ios::binary) << text;
  return p;
}

}  // namespace

TEST_CASE("analyze on the planar instance") {
  const Run r = run("--input " + data("trs_2d.json"));
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["case"] == "BoundaryPositive");
  CHECK(j["lambda"].get<double>() == doctest::Approx(8.0));
  CHECK(j["qp"]["bordered"]["abs_det"].get<double>() == doctest::Approx(63.0 / 8.0));
  CHECK(j["lipschitz_like"] == "yes");
  CHECK(j["robinson_stable"] == "yes");
}

TEST_CASE("analyze on the degenerate spatial point") {
  const Run r = run("--input " + data("trs_3d_degenerate.json"));
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["lipschitz_like"] == "no");
}

TEST_CASE("exit codes") {
  const std::string base = R"("n": 2, "D": [[0, 0], [0, -8]], "c": [1, 0], "A": [[1, 0], [0, 1]], "b": [0, 0], )";
  SUBCASE("not stationary") {
    const fs::path p = write_file("ns.json", "{" + base + R"("alpha": -0.5, "x_bar": [1, 0]})");
    const Run r = run("--input '" + p.string() + "'");
    CHECK(r.code == 2);
    CHECK(json::parse(r.out)["stationarity"]["residual"].get<double>() == doctest::Approx(1.0));
  }
  SUBCASE("MFCQ fails") {
    const fs::path p = write_file(
        "mfcq.json", R"({"n": 1, "D": [[1]], "c": [1], "A": [[1]], "b": [0], "alpha": 0, "x_bar": [0]})");
    CHECK(run("--input '" + p.string() + "'").code == 3);
  }
  SUBCASE("malformed JSON") {
    const fs::path p = write_file("bad.json", "{\n \"n\": 2,\n \"D\": [[0, 0]\n");
    const Run r = run("--input '" + p.string() + "'");
    CHECK(r.code == 1);
    CHECK(r.err.find("line") != std::string::npos);
    CHECK(r.err.find("column") != std::string::npos);
  }
  SUBCASE("dimension mismatch") {
    const fs::path p = write_file("dim.json", "{" + base + R"("alpha": -0.5, "x_bar": [1, 0, 0]})");
    CHECK(run("--input '" + p.string() + "'").code == 1);
  }
  SUBCASE("samples = 0") {
    CHECK(run("--input " + data("trs_2d.json") + " --command verify-robinson --samples 0").code == 1);
  }
  SUBCASE("unknown command") { CHECK(run("--input " + data("trs_2d.json") + " --command frobnicate").code == 1); }
  SUBCASE("missing file") { CHECK(run("--input /nonexistent.json").code == 1); }
}

TEST_CASE("tolerance precedence") {
  // At x̄ = (−1, 1e-7) the stationarity residual is about 8e-7.
  const fs::path p = write_file(
      "near.json",
      R"({"n": 2, "D": [[0, 0], [0, -8]], "c": [1, 0], "A": [[1, 0], [0, 1]], "b": [0, 0], "alpha": -0.5000000000000050, "x_bar": [-1, 1e-7]})");
  const std::string in = "--input '" + p.string() + "'";
  CHECK(run(in).code == 2);
  CHECK(run(in, "STABCERT_TOL=1e-5").code == 0);
  CHECK(run(in + " --tol 1e-12", "STABCERT_TOL=1e-5").code == 2);
  CHECK(run(in, "STABCERT_TOL=banana").code == 1);
}

TEST_CASE("verify writes a summary and a reproducible CSV") {
  const fs::path csv1 = scratch() / "a.csv";
  const fs::path csv2 = scratch() / "b.csv";
  const std::string args = "--input " + data("trs_2d.json") + " --command verify-robinson --samples 50 --seed 4";
  const Run r1 = run(args + " --csv '" + csv1.string() + "'");
  const Run r2 = run(args + " --csv '" + csv2.string() + "'");
  REQUIRE(r1.code == 0);
  CHECK(r1.out == r2.out);
  CHECK(slurp(csv1) == slurp(csv2));
  const json j = json::parse(r1.out);
  for (const char* k : {"seed", "radius_x", "radius_w", "samples", "scheme", "max_ratio", "divergence_flag",
                        "companion_max_ratio", "best_effort", "witness_worst", "skipped", "ratios"})
    CHECK(j.contains(k));
  CHECK(j["seed"] == 4);
  CHECK(std::isfinite(j["max_ratio"].get<double>()));
  const std::string text = slurp(csv1);
  CHECK(text.rfind("index,w_distance,x_distance,residual,ratio,skip_reason\n", 0) == 0);
  std::istringstream lines(text);
  std::string line;
  std::getline(lines, line);
  int used = 0;
  while (std::getline(lines, line))
    if (line.back() == ',') ++used;
  CHECK(used >= 1);
}

TEST_CASE("verify-lipschitz with the tilt scheme") {
  const Run r = run("--input " + data("trs_2d.json") + " --command verify-lipschitz --scheme tilt --samples 30");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["scheme"] == "tilt");
  CHECK(j["best_effort"] == false);
}

TEST_CASE("verify on a general constraint is flagged best-effort") {
  const fs::path p = write_file(
      "hyp.json",
      R"({"n": 2, "D": [[1, 0], [0, 1]], "c": [-2, 0], "A": [[1, 0], [0, -1]], "b": [0, 0], "alpha": -0.5, "x_bar": [1, 0]})");
  const Run r = run("--input '" + p.string() + "' --command verify-robinson --samples 10");
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["best_effort"] == true);
  CHECK(r.err.find("best-effort") != std::string::npos);
}

TEST_CASE("sweep along a tilt of c") {
  const fs::path csv = scratch() / "sweep.csv";
  const Run r = run("--input " + data("trs_2d.json") + " --command sweep --ray " + data("rays/tilt_c1.json") +
                    " --steps 11 --t-min 0 --t-max 0.05 --radius-x 0.2 --csv '" + csv.string() + "'");
  REQUIRE(r.code == 0);
  std::istringstream lines(slurp(csv));
  std::string line;
  std::getline(lines, line);
  CHECK(line.rfind("t,point,x1,x2,lambda,kind,isolated,distance_to_x_bar,status,case", 0) == 0);
  std::set<std::string> ts;
  while (std::getline(lines, line)) ts.insert(line.substr(0, line.find(',')));
  CHECK(ts.size() == 11);
}

TEST_CASE("sweep with one step reproduces analyze") {
  const fs::path csv = scratch() / "one.csv";
  const Run r = run("--input " + data("trs_2d.json") + " --command sweep --ray " + data("rays/tilt_c1.json") +
                    " --steps 1 --radius-x 1e-6 --csv '" + csv.string() + "'");
  REQUIRE(r.code == 0);
  std::istringstream lines(slurp(csv));
  std::string header, row;
  std::getline(lines, header);
  REQUIRE(std::getline(lines, row));
  CHECK_FALSE(std::getline(lines, header));
  CHECK(row.find(",ok,BoundaryPositive,yes,yes,yes") != std::string::npos);
}

TEST_CASE("sweep with a zero ray repeats the same rows") {
  const fs::path ray = write_file("zero_ray.json", "{}");
  const fs::path csv = scratch() / "zero.csv";
  const Run r = run("--input " + data("trs_2d.json") + " --command sweep --ray '" + ray.string() +
                    "' --steps 4 --csv '" + csv.string() + "'");
  REQUIRE(r.code == 0);
  std::istringstream lines(slurp(csv));
  std::string line;
  std::getline(lines, line);
  std::map<std::string, std::set<std::string>> by_point;
  while (std::getline(lines, line)) {
    const std::size_t a = line.find(',');
    const std::size_t b = line.find(',', a + 1);
    by_point[line.substr(a + 1, b - a - 1)].insert(line.substr(b + 1));
  }
  CHECK(by_point.size() == 3);
  for (const auto& [k, rows] : by_point) CHECK(rows.size() == 1);
}

TEST_CASE("snapshots are accepted by analyze only") {
  const fs::path p = write_file("snap.json", R"({
    "x_bar": [-1, 0], "grad_f0": [1, 0], "hess_xx_f0": [[0, 0], [0, -8]],
    "F_value": 0, "grad_x_F": [-1, 0], "hess_xx_F": [[1, 0], [0, 1]], "qp_structure": true})");
  CHECK(run("--input '" + p.string() + "'").code == 0);
  CHECK(run("--input '" + p.string() + "' --command verify-robinson").code == 1);
}
