#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "frad/data.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome frad_run(std::vector<std::string> args) {
  args.insert(args.begin(), "frad");
  std::ostringstream out, err;
  Outcome o;
  o.code = frad::cli::run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

}  // namespace

TEST_CASE("help documents the exit codes") {
  const auto o = frad_run({"--help"});
  CHECK(o.code == 0);
  CHECK(o.out.find("Exit codes") != std::string::npos);
  CHECK(o.out.find("run-all") != std::string::npos);
}

TEST_CASE("usage errors exit 1 with a one-line diagnostic") {
  const auto o = frad_run({"train", "--bogus-flag"});
  CHECK(o.code == 1);
  CHECK(o.err.rfind("frad: error:", 0) == 0);
  CHECK(std::count(o.err.begin(), o.err.end(), '\n') == 1);
  CHECK(frad_run({}).code == 1);
  CHECK(frad_run({"synth", "--noise", "-1"}).code == 1);
}

TEST_CASE("synth writes a dataset; zero rows is a valid empty file") {
  const auto dir = testing_support::scratch_dir("cli_synth");
  auto o = frad_run({"synth", "--n", "0", "--out-dir", dir.string()});
  CHECK(o.code == 0);
  CHECK(frad::load_dataset(dir / "dataset.csv").n_rows() == 0);

  o = frad_run({"synth", "--n", "120", "--seed", "5", "--output", (dir / "d.csv").string()});
  CHECK(o.code == 0);
  const auto d = frad::load_dataset(dir / "d.csv");
  CHECK(d.n_rows() == 120);
  const auto meta = nlohmann::json::parse(frad::read_file(dir / "d.csv.meta.json"));
  CHECK(meta["seed"] == 5);
  CHECK(meta["config_hash"].get<std::string>().size() == 16);
}

TEST_CASE("missing inputs exit 2, schema problems exit 3") {
  const auto dir = testing_support::scratch_dir("cli_errors");
  auto o = frad_run({"train", "--data", (dir / "absent.csv").string(), "--out-dir", dir.string()});
  CHECK(o.code == 2);
  CHECK(o.err.find("frad: error:") != std::string::npos);

  std::ofstream(dir / "bad.csv") << "x,y\n1,2\n";
  o = frad_run({"corr", "--data", (dir / "bad.csv").string(), "--out-dir", dir.string()});
  CHECK(o.code == 3);

  o = frad_run({"evaluate", "--out-dir", (dir / "nothing").string()});
  CHECK(o.code == 2);
}

TEST_CASE("end-to-end run, evaluation and prediction") {
  const auto dir = testing_support::scratch_dir("cli_e2e");
  const std::vector<std::string> common{"--n", "300", "--seed", "7", "--hpo-budget", "2", "--hpo-init", "2",
                                        "--mlp-epochs", "3", "--models", "rf,mlp"};
  std::vector<std::string> args{"run-all", "--out-dir", (dir / "a").string()};
  args.insert(args.end(), common.begin(), common.end());
  auto o = frad_run(args);
  INFO(o.err);
  REQUIRE(o.code == 0);
  for (const char* f : {"dataset.csv", "train.csv", "test.csv", "correlation.svg", "rf.model.json", "mlp.model.json",
                        "rf.trials.jsonl", "comparison.json", "comparison.md", "run_config.json"}) {
    CHECK(fs::exists(dir / "a" / f));
  }
  const auto report = nlohmann::json::parse(frad::read_file(dir / "a" / "comparison.json"));
  CHECK(report["seed"] == 7);
  CHECK(report["models"].size() == 2);
  const std::string run_id = report["run_id"];
  CHECK(fs::exists(dir / "a" / (run_id + "_rf_confusion.svg")));

  args[2] = (dir / "b").string();
  args.push_back("--threads");
  args.push_back("3");
  REQUIRE(frad_run(args).code == 0);
  CHECK(frad::read_file(dir / "a" / "comparison.json") == frad::read_file(dir / "b" / "comparison.json"));
  CHECK(frad::read_file(dir / "a" / "rf.model.json") == frad::read_file(dir / "b" / "rf.model.json"));

  // Evaluation alone reproduces the report.
  fs::remove(dir / "a" / "comparison.json");
  REQUIRE(frad_run({"evaluate", "--out-dir", (dir / "a").string()}).code == 0);
  CHECK(frad::read_file(dir / "a" / "comparison.json") == frad::read_file(dir / "b" / "comparison.json"));

  o = frad_run({"predict", "--model", (dir / "a" / "rf.model.json").string(), "--data",
                (dir / "a" / "test.csv").string()});
  REQUIRE(o.code == 0);
  const auto n_test = frad::load_dataset(dir / "a" / "test.csv").n_rows();
  CHECK(static_cast<std::size_t>(std::count(o.out.begin(), o.out.end(), '\n')) == n_test + 1);
  CHECK(o.out.rfind("p_displacement,p_insertion,p_suppression,predicted_label\n", 0) == 0);
}

TEST_CASE("TOML config supplies options and flags override it") {
  const auto dir = testing_support::scratch_dir("cli_config");
  std::ofstream(dir / "run.toml") << "[synth]\nn = 40\nseed = 3\n";
  auto o = frad_run({"--config", (dir / "run.toml").string(), "synth", "--out-dir", dir.string()});
  INFO(o.err);
  REQUIRE(o.code == 0);
  CHECK(frad::load_dataset(dir / "dataset.csv").n_rows() == 40);
  o = frad_run({"--config", (dir / "run.toml").string(), "synth", "--n", "50", "--out-dir", dir.string()});
  REQUIRE(o.code == 0);
  CHECK(frad::load_dataset(dir / "dataset.csv").n_rows() == 50);
}

TEST_CASE("FRAD_OUT_DIR sets the default output directory") {
  const auto dir = testing_support::scratch_dir("cli_env");
  setenv("FRAD_OUT_DIR", (dir / "env_out").string().c_str(), 1);
  const auto o = frad_run({"synth", "--n", "9"});
  unsetenv("FRAD_OUT_DIR");
  CHECK(o.code == 0);
  CHECK(fs::exists(dir / "env_out" / "dataset.csv"));
}
