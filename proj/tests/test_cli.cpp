#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "landau_ee/cli.hpp"

namespace {
constexpr double kPi = 3.14159265358979323846;
const double kLogSlope = 1.0 / (std::sqrt(2.0) * std::pow(kPi, 3));

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = landau_ee::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

nlohmann::json fit_of(const nlohmann::json& arr) {
  REQUIRE(arr.is_array());
  REQUIRE(!arr.empty());
  REQUIRE(arr.back().value("kind", "") == "fit");
  return arr.back();
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("landau_ee_test_" + name);
}
}  // namespace

TEST_CASE("kernel-eval") {
  const Result r = run({"kernel-eval", "--K", "50", "--t-grid", "0:60:0.5"});
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 122);
  CHECK(rows[0] == std::vector<std::string>{"t", "exact", "asymptotic", "regime", "error_estimate", "abs_diff"});
  int pass = 0;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (std::stod(rows[i][5]) <= std::stod(rows[i][4])) ++pass;
  CHECK(pass >= 0.95 * 121);

  const Result one = run({"kernel-eval", "--K", "1", "--t-grid", "0:0:1"});
  REQUIRE(one.code == 0);
  const auto single = csv_rows(one.out);
  REQUIRE(single.size() == 2);
  CHECK(std::stod(single[1][1]) == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-15));

  const Result pts = run({"kernel-eval", "--K", "4", "--points", "0.5,1.5", "--format", "json"});
  REQUIRE(pts.code == 0);
  CHECK(nlohmann::json::parse(pts.out).size() == 2);

  const Result missing = run({"kernel-eval", "--t-grid", "0:1:0.5"});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("Usage") != std::string::npos);
  CHECK(run({"kernel-eval", "--K", "5", "--t-grid", "-1:1:0.5"}).code == 2);
  CHECK(run({"no-such-command"}).code == 2);
  CHECK(run({}).code == 2);
}

TEST_CASE("fluctuation-scan") {
  const Result r = run({"fluctuation-scan", "--domain", "disk", "--K-list", "16", "--L-list", "50,100,200,400", "--fit",
                        "--format", "json"});
  REQUIRE(r.code == 0);
  const auto arr = nlohmann::json::parse(r.out);
  CHECK(arr.size() == 5);
  CHECK(fit_of(arr)["relative_deviation"].get<double>() <= 0.15);
  for (std::size_t i = 0; i + 1 < arr.size(); ++i) {
    CHECK(arr[i]["regime"] == "lnK");
    CHECK(arr[i]["domain_id"] == "disk");
    CHECK(arr[i]["f_id"] == "t(1-t)^1");
  }

  const Result slope = run({"fluctuation-scan", "--K-list", "400", "--L-list", "10,20,40,80", "--fit", "--format", "json"});
  REQUIRE(slope.code == 0);
  const auto fit = fit_of(nlohmann::json::parse(slope.out));
  CHECK(fit["predicted_slope"].get<double>() == doctest::Approx(kLogSlope).epsilon(1e-14));
  CHECK(fit["relative_deviation"].get<double>() <= 0.15);

  const Result single = run({"fluctuation-scan", "--K-list", "8", "--L-list", "6", "--fit"});
  REQUIRE(single.code == 0);
  CHECK(csv_rows(single.out).size() == 2);

  const Result sq = run({"fluctuation-scan", "--domain", "square", "--K-list", "8", "--L-list", "5,10"});
  REQUIRE(sq.code == 0);
  const auto rows = csv_rows(sq.out);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double L = std::stod(rows[i][1]);
    const double expected = kLogSlope * L * 4.0 * std::log(std::min(8.0, L));
    CHECK(std::stod(rows[i][5]) == doctest::Approx(expected).epsilon(1e-12));
  }

  const Result poly = run({"fluctuation-scan", "--domain", "polygon:0,0;2,0;0,1", "--K-list", "4", "--L-list", "3"});
  REQUIRE(poly.code == 0);
  CHECK(csv_rows(poly.out)[1][2] == "polygon3");
  CHECK(run({"fluctuation-scan", "--domain", "polygon:0,0;1,1;1,0;0,1", "--K-list", "4", "--L-list", "3"}).code == 2);
  CHECK(run({"fluctuation-scan", "--domain", "blob", "--K-list", "4", "--L-list", "3"}).code == 2);

  const Result nys =
      run({"fluctuation-scan", "--K-list", "4", "--L-list", "2", "--method", "nystrom", "--grid-h", "0.1"});
  const Result fast = run({"fluctuation-scan", "--K-list", "4", "--L-list", "2"});
  REQUIRE(nys.code == 0);
  CHECK(std::stod(csv_rows(nys.out)[1][4]) == doctest::Approx(std::stod(csv_rows(fast.out)[1][4])).epsilon(1e-2));
}

TEST_CASE("mk-scan") {
  const Result r = run({"mk-scan", "--K-list", "16,32,64", "--m", "1", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto fit = fit_of(nlohmann::json::parse(r.out));
  CHECK(fit["predicted_slope"].get<double>() == doctest::Approx(kLogSlope).epsilon(1e-14));
  CHECK(fit["relative_deviation"].get<double>() <= 0.15);

  const Result m2 = run({"mk-scan", "--K-list", "16,32,64", "--m", "2", "--format", "json"});
  REQUIRE(m2.code == 0);
  CHECK(fit_of(nlohmann::json::parse(m2.out))["relative_deviation"].get<double>() <= 0.2);

  const Result sym = run({"mk-scan", "--K-list", "20", "--verify-symmetry"});
  CHECK(sym.code == 0);
  CHECK(sym.err.find("pass") != std::string::npos);

  CHECK(run({"mk-scan", "--K-list", "300"}).code == 1);
  CHECK(run({"mk-scan", "--K-list", "300", "--max-K", "512", "--p-nodes", "8"}).code == 0);
  CHECK(run({"mk-scan", "--K-list", "16", "--m", "6"}).code == 2);
}

TEST_CASE("sine-check") {
  const std::vector<std::string> args{"sine-check", "--K", "400", "--samples", "500", "--seed", "3"};
  const Result a = run(args), b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto rep = nlohmann::json::parse(a.out);
  for (const char* key : {"K", "epsilon", "samples", "max_scaled_residual", "fitted_C"}) CHECK(rep.contains(key));
  CHECK(std::isfinite(rep["max_scaled_residual"].get<double>()));

  const auto c200 = nlohmann::json::parse(run({"sine-check", "--K", "200", "--samples", "500"}).out);
  const auto c800 = nlohmann::json::parse(run({"sine-check", "--K", "800", "--samples", "500"}).out);
  CHECK(c800["fitted_C"].get<double>() <= 2.0 * c200["fitted_C"].get<double>());

  CHECK(run({"sine-check", "--K", "50", "--samples", "10"}).code == 2);
  const auto theorem = nlohmann::json::parse(run({"sine-check", "--K", "400", "--samples", "10", "--window", "theorem"}).out);
  CHECK(theorem["empty"].get<bool>());
}

TEST_CASE("widom") {
  const Result r = run({"widom", "--lambda-list", "20,40,80,160", "--m", "1", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto fit = fit_of(nlohmann::json::parse(r.out));
  CHECK(fit["predicted_slope"].get<double>() == doctest::Approx(1.0 / (kPi * kPi)).epsilon(1e-14));
  CHECK(fit["relative_deviation"].get<double>() <= 0.1);

  const Result m2 = run({"widom", "--lambda-list", "20,40,80,160", "--m", "2", "--format", "json"});
  REQUIRE(m2.code == 0);
  const auto fit2 = fit_of(nlohmann::json::parse(m2.out));
  CHECK(fit2["predicted_slope"].get<double>() == doctest::Approx(1.0 / (6.0 * kPi * kPi)).epsilon(1e-14));
  CHECK(fit2["relative_deviation"].get<double>() <= 0.15);

  CHECK(run({"widom", "--lambda-list", ""}).code == 2);
  CHECK(run({"widom", "--m", "1"}).code == 2);
}

TEST_CASE("calibrate reproduces the shipped table") {
  const Result r = run({"calibrate"});
  REQUIRE(r.code == 0);
  std::ifstream f(std::string(LANDAU_EE_SOURCE_DIR) + "/data/calibration.txt");
  REQUIRE(f);
  std::stringstream shipped;
  shipped << f.rdbuf();
  CHECK(r.out == shipped.str());
}

TEST_CASE("output plumbing: --out, --format, --config") {
  const auto path = temp_file("scan.csv");
  std::filesystem::remove(path);
  const Result r = run({"fluctuation-scan", "--K-list", "8", "--L-list", "3,4", "--out", path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream f(path);
  std::stringstream text;
  text << f.rdbuf();
  CHECK(text.str() == run({"fluctuation-scan", "--K-list", "8", "--L-list", "3,4"}).out);

  const auto cfg = temp_file("config.json");
  {
    std::ofstream c(cfg);
    c << R"({"K-list": [8], "L-list": [3, 4], "format": "json", "fit": false})";
  }
  const Result from_file = run({"fluctuation-scan", "--config", cfg.string()});
  REQUIRE(from_file.code == 0);
  CHECK(nlohmann::json::parse(from_file.out).size() == 2);
  const Result overridden = run({"fluctuation-scan", "--config", cfg.string(), "--L-list", "5", "--format", "csv"});
  REQUIRE(overridden.code == 0);
  const auto rows = csv_rows(overridden.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1][1] == "5");

  {
    std::ofstream c(cfg);
    c << "{not json";
  }
  CHECK(run({"fluctuation-scan", "--config", cfg.string()}).code == 2);
  CHECK(run({"fluctuation-scan", "--config", "/nonexistent/cfg.json"}).code == 2);
  std::filesystem::remove(cfg);
  std::filesystem::remove(path);

  const Result timed = run({"fluctuation-scan", "--K-list", "8", "--L-list", "3", "--timing", "--format", "json"});
  REQUIRE(timed.code == 0);
  CHECK(nlohmann::json::parse(timed.out)[0]["runtime_ms"].get<long long>() >= 0);
}

TEST_CASE("thread count never changes output") {
  const std::vector<std::vector<std::string>> cases{
      {"kernel-eval", "--K", "50", "--t-grid", "0:60:0.5"},
      {"fluctuation-scan", "--K-list", "8,16", "--L-list", "10,20,40", "--fit"},
      {"fluctuation-scan", "--K-list", "4", "--L-list", "3", "--method", "nystrom", "--grid-h", "0.2"},
      {"mk-scan", "--K-list", "16,24,32", "--m", "2"},
      {"sine-check", "--K", "400", "--samples", "200"},
      {"widom", "--lambda-list", "10,20,40", "--m", "2"},
  };
  for (const auto& c : cases) {
    auto one = c, eight = c;
    one.insert(one.end(), {"--threads", "1"});
    eight.insert(eight.end(), {"--threads", "8"});
    const Result a = run(one), b = run(eight);
    CHECK(a.code == 0);
    CHECK(a.out == b.out);
  }
  setenv("LANDAU_EE_THREADS", "3", 1);
  const Result env = run(cases[1]);
  unsetenv("LANDAU_EE_THREADS");
  CHECK(env.out == run(cases[1]).out);
}
