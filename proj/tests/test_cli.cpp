#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "fixtures.hpp"
#include "planforge/planforge.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

struct Scratch {
  fs::path path;
  Scratch() {
    path = fs::temp_directory_path() /
           ("planforge-cli-" +
            std::to_string(
                std::chrono::steady_clock::now().time_since_epoch().count()));
    fs::create_directories(path);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  return fs::exists(p) ? planforge::read_text_file(p) : std::string();
}

// Runs the installed binary through the shell, capturing both streams.
CliResult run_cli(const std::string& args, const std::string& env = "") {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path();
  const std::string tag = "planforge-io-" + std::to_string(::getpid()) + "-" +
                          std::to_string(counter++);
  const fs::path out_path = dir / (tag + ".out");
  const fs::path err_path = dir / (tag + ".err");

  std::string cmd;
  if (!env.empty()) cmd += env + " ";
  cmd += std::string(PLANFORGE_CLI_PATH) + " " + args + " > " +
         out_path.string() + " 2> " + err_path.string();
  const int status = std::system(cmd.c_str());

  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  fs::remove(out_path);
  fs::remove(err_path);
  return result;
}

std::string data_args() {
  const fs::path dir = fixtures::data_dir();
  return "--rsm " + (dir / "rsm.csv").string() + " --catalog " +
         (dir / "catalog.txt").string() + " --query " +
         (dir / "q1.sql").string();
}

}  // namespace

TEST_CASE("cli help and usage errors") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("--help").out.find("optimize") != std::string::npos);

  CHECK(run_cli("").exit_code == 2);           // a subcommand is required
  CHECK(run_cli("frobnicate").exit_code == 2);  // unknown subcommand
  CHECK(run_cli("optimize").exit_code == 2);    // missing required options

  const CliResult bad_algo =
      run_cli("optimize " + data_args() + " --algo annealing");
  CHECK(bad_algo.exit_code == 2);
}

TEST_CASE("cli optimize writes a structured report") {
  Scratch scratch;
  const fs::path report_path = scratch.path / "report.json";
  const CliResult r = run_cli("optimize " + data_args() +
                              " --algo tlbo --iters 5 --seed 9 --out " +
                              report_path.string());
  INFO(r.err);
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("algorithm: tlbo (discrete)") != std::string::npos);
  CHECK(r.out.find("termination: max_iterations") != std::string::npos);
  CHECK(r.out.find("best plans:") != std::string::npos);
  CHECK(r.out.find("report written to") != std::string::npos);

  const auto j = nlohmann::json::parse(planforge::read_text_file(report_path));
  CHECK(j.at("algorithm") == "tlbo");
  CHECK(j.at("mode") == "discrete");
  CHECK(j.at("config").at("seed") == 9);
  CHECK(j.at("config").at("max_iterations") == 5);
  CHECK(j.at("ranked").size() == 20);
  CHECK(j.at("trace").size() == 6);
  CHECK(j.at("iterations_to_topk").is_null());
  for (const auto& entry : j.at("ranked")) {
    CHECK(entry.at("plan").size() == 8);
    CHECK(entry.contains("qac"));
    CHECK(entry.contains("control_site"));
  }
}

TEST_CASE("cli optimize is reproducible byte for byte") {
  Scratch scratch;
  const fs::path a = scratch.path / "a.json";
  const fs::path b = scratch.path / "b.json";
  const std::string base =
      "optimize " + data_args() + " --algo vega --iters 6 --seed 4 --out ";
  REQUIRE(run_cli(base + a.string()).exit_code == 0);
  REQUIRE(run_cli(base + b.string()).exit_code == 0);
  CHECK(planforge::read_text_file(a) == planforge::read_text_file(b));
}

TEST_CASE("cli optimize runs every algorithm") {
  Scratch scratch;
  for (const std::string algo : {"tlbo", "agga", "vega"}) {
    const fs::path out = scratch.path / (algo + ".json");
    const CliResult r = run_cli("optimize " + data_args() + " --algo " + algo +
                                " --iters 3 --out " + out.string());
    INFO(algo << ": " << r.err);
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(planforge::read_text_file(out));
    CHECK(j.at("algorithm") == algo);
  }

  SECTION("faithful mode is tlbo-only") {
    const CliResult r = run_cli("optimize " + data_args() +
                                " --algo agga --mode faithful --out " +
                                (scratch.path / "x.json").string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("faithful") != std::string::npos);
  }
}

TEST_CASE("cli generate and oracle cooperate") {
  Scratch scratch;
  const fs::path inst_dir = scratch.path / "instance";
  const CliResult gen = run_cli(
      "generate --sites 6 --relations 3 --degree 3 --seed 5 --out " +
      inst_dir.string());
  INFO(gen.err);
  REQUIRE(gen.exit_code == 0);
  CHECK(gen.out.find("plan space: 27 plans") != std::string::npos);
  CHECK(fs::exists(inst_dir / "rsm.csv"));
  CHECK(fs::exists(inst_dir / "catalog.txt"));
  CHECK(fs::exists(inst_dir / "query.sql"));

  const std::string inst_args = "--rsm " + (inst_dir / "rsm.csv").string() +
                                " --catalog " +
                                (inst_dir / "catalog.txt").string() +
                                " --query " + (inst_dir / "query.sql").string();

  const CliResult oracle = run_cli("oracle " + inst_args + " --k 5");
  INFO(oracle.err);
  REQUIRE(oracle.exit_code == 0);

  // the CSV on stdout is exactly what the library computes
  const planforge::Instance inst = planforge::load_instance(
      inst_dir / "rsm.csv", inst_dir / "catalog.txt", inst_dir / "query.sql");
  const auto top =
      planforge::exact_topk(inst.rsm, inst.catalog, inst.query, 5);
  std::ostringstream expected;
  planforge::write_oracle_csv(top, expected);
  CHECK(oracle.out == expected.str());

  SECTION("weighted ranking differs from sphere ranking output") {
    const CliResult weighted = run_cli("oracle " + inst_args +
                                       " --k 5 --fitness weighted "
                                       "--weights 0.2,0.5,0.3");
    REQUIRE(weighted.exit_code == 0);
    const auto spec = planforge::FitnessSpec::weighted(
        planforge::Weights::make(0.2, 0.5, 0.3));
    const auto wtop =
        planforge::exact_topk(inst.rsm, inst.catalog, inst.query, 5, spec);
    std::ostringstream wexpected;
    planforge::write_oracle_csv(wtop, wexpected);
    CHECK(weighted.out == wexpected.str());
  }
  SECTION("invalid weights are a usage error") {
    const CliResult r = run_cli("oracle " + inst_args +
                                " --fitness weighted --weights 0.5,0.5,0.5");
    CHECK(r.exit_code == 2);
  }
}

TEST_CASE("cli oracle refuses oversized spaces with exit 3") {
  const CliResult r = run_cli("oracle " + data_args() + " --bound 1000");
  CHECK(r.exit_code == 3);
  CHECK(r.err.find("enumeration bound") != std::string::npos);
}

TEST_CASE("cli sweep matches the library and honors the thread cap") {
  Scratch scratch;
  const fs::path spec_path = scratch.path / "spec.json";
  const std::string spec_json = R"({
    "algorithms": ["tlbo", "agga"],
    "instances": [{"n_sites": 4, "n_relations": 3, "degree": 2, "seed": 1}],
    "k_values": [2],
    "qc_thresholds": [0.5, 10.0],
    "seeds": [1, 2],
    "max_iterations": 2
  })";
  planforge::write_text_file(spec_path, spec_json);

  const fs::path csv_path = scratch.path / "rows.csv";
  const CliResult r =
      run_cli("sweep " + spec_path.string() + " --out " + csv_path.string());
  INFO(r.err);
  REQUIRE(r.exit_code == 0);

  const auto rows = planforge::run_sweep(planforge::load_sweep_spec(spec_json));
  std::ostringstream expected;
  planforge::write_sweep_csv(rows, expected);
  CHECK(planforge::read_text_file(csv_path) == expected.str());

  SECTION("thread cap changes nothing about the output") {
    const CliResult threaded = run_cli("sweep " + spec_path.string(),
                                       "PLANFORGE_THREADS=4");
    REQUIRE(threaded.exit_code == 0);
    CHECK(threaded.out == expected.str());
  }
  SECTION("a malformed thread cap is a usage error naming the variable") {
    const CliResult bad = run_cli("sweep " + spec_path.string(),
                                  "PLANFORGE_THREADS=abc");
    CHECK(bad.exit_code == 2);
    CHECK(bad.err.find("PLANFORGE_THREADS") != std::string::npos);
  }
}

TEST_CASE("cli surfaces file problems as exit 2 with positions") {
  Scratch scratch;
  const fs::path broken = scratch.path / "broken.csv";
  planforge::write_text_file(broken, "site,R1\n1,7\n");
  const fs::path dir = fixtures::data_dir();
  const CliResult r = run_cli(
      "optimize --rsm " + broken.string() + " --catalog " +
      (dir / "catalog.txt").string() + " --query " + (dir / "q1.sql").string() +
      " --algo tlbo --out " + (scratch.path / "r.json").string());
  CHECK(r.exit_code == 2);
  CHECK(r.err.find("broken.csv") != std::string::npos);
  CHECK(r.err.find("line 2") != std::string::npos);

  const CliResult missing = run_cli(
      "optimize --rsm /nonexistent/rsm.csv --catalog " +
      (dir / "catalog.txt").string() + " --query " + (dir / "q1.sql").string() +
      " --algo tlbo --out " + (scratch.path / "r.json").string());
  CHECK(missing.exit_code == 2);
}
