#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "cli_app.hpp"
#include "test_support.hpp"
#include "ugr/errors.hpp"

namespace {

struct CliResult {
  int exit_code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ugrec");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = ugr::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string covid_path() { return test_support::data_path("covid_andorra_positivity.csv"); }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("moments subcommand emits the reference means") {
  const CliResult r = run_cli({"moments", "--theta", "1.5", "--k", "2", "--n", "6"});
  REQUIRE(r.exit_code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "n,mean,variance");
  const double expected[] = {0.79920, 0.66800, 0.57653, 0.50939, 0.45806, 0.41752};
  for (int i = 0; i < 6; ++i) {
    REQUIRE(std::getline(lines, line));
    std::istringstream cells(line);
    std::string n_cell, mean_cell;
    std::getline(cells, n_cell, ',');
    std::getline(cells, mean_cell, ',');
    CHECK(std::stoi(n_cell) == i + 1);
    CHECK(std::fabs(std::stod(mean_cell) - expected[i]) <= 5e-5);
  }
}

TEST_CASE("analyze subcommand reports the worked estimates as JSON") {
  const CliResult r = run_cli({"analyze", "--input", covid_path(), "--k", "2", "--theta", "1.5",
                               "--n", "4", "--level", "0.95", "--seed", "42", "--reps", "2000",
                               "--format", "json"});
  REQUIRE(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(std::fabs(j["estimates"]["mu_blue"].get<double>() - 0.08321097) <= 1e-3);
  CHECK(std::fabs(j["estimates"]["sigma_blue"].get<double>() - 0.2203375) <= 1e-3);
  CHECK(j["records"]["values"].size() == 5);
  CHECK(j["intervals"].size() == 6);
}

TEST_CASE("tables subcommand is byte-for-byte reproducible") {
  const auto dir = std::filesystem::temp_directory_path() / "ugr_cli_tables";
  std::filesystem::create_directories(dir);
  const auto p1 = dir / "t3_a.csv";
  const auto p2 = dir / "t3_b.csv";
  CHECK(run_cli({"tables", "--id", "3", "--out", p1.string()}).exit_code == 0);
  CHECK(run_cli({"tables", "--id", "3", "--out", p2.string()}).exit_code == 0);
  CHECK(slurp(p1) == slurp(p2));
  CHECK(std::filesystem::exists(dir / "manifest.json"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("pivot cache round trip through the CLI") {
  const auto dir = std::filesystem::temp_directory_path() / "ugr_cli_pivots";
  std::filesystem::create_directories(dir);
  const CliResult w =
      run_cli({"pivots", "--theta", "1.5", "--k", "2", "--n", "4", "--reps", "2000", "--seed",
               "9", "--pivot", "T1", "--out-dir", dir.string()});
  REQUIRE(w.exit_code == 0);
  CHECK(std::filesystem::exists(dir / "T1_2_1.5_4.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("seeded runs are reproducible through the CLI") {
  const std::vector<std::string> args = {"study", "--theta", "1.5",    "--k",  "1",  "--n",
                                         "3",     "--reps",  "200",    "--seed", "77",
                                         "--pivot-reps", "2000"};
  const CliResult a = run_cli(args);
  const CliResult b = run_cli(args);
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("usage errors exit with code 1 and print a synopsis") {
  const CliResult unknown_flag = run_cli({"moments", "--bogus", "3"});
  CHECK(unknown_flag.exit_code == 1);
  CHECK(unknown_flag.err.find("Usage") != std::string::npos);

  const CliResult no_sub = run_cli({});
  CHECK(no_sub.exit_code == 1);

  const CliResult missing_input = run_cli({"analyze", "--k", "2", "--theta", "1.5"});
  CHECK(missing_input.exit_code == 1);

  const CliResult bad_file =
      run_cli({"estimate", "--input", "/nonexistent/file.csv", "--k", "2", "--theta", "1.5"});
  CHECK(bad_file.exit_code == 1);
}

TEST_CASE("error kinds map onto the exit codes") {
  // the dispatcher returns Error::kind() as the exit code
  CHECK(static_cast<int>(ugr::DomainError("x").kind()) == 1);
  CHECK(static_cast<int>(ugr::MissingQuantileError("x").kind()) == 1);
  CHECK(static_cast<int>(ugr::ConditioningError("x").kind()) == 2);
  CHECK(static_cast<int>(ugr::OptimizationError("x").kind()) == 2);
  CHECK(static_cast<int>(ugr::UndefinedBoundError("x", -0.5).kind()) == 2);
}

TEST_CASE("help exits cleanly") {
  CHECK(run_cli({"--help"}).exit_code == 0);
}
