#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kCli = INTENTMINER_CLI_PATH;

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("im_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli: end-to-end stage subcommands") {
  TempDir dir;
  const auto corpus = (dir.path / "corpus.jsonl").string();
  const auto prepped = (dir.path / "prepped.jsonl").string();

  REQUIRE(run("synth --out " + corpus + " --docs 200 --yes 120 --fillers 20 --seed 3") == 0);
  REQUIRE(fs::exists(corpus));

  REQUIRE(run("ingest --input " + corpus + " --out " + (dir.path / "ingested.jsonl").string() +
              " --lang en") == 0);

  REQUIRE(run("preprocess --input " + corpus + " --out " + prepped) == 0);
  {
    std::ifstream in(prepped);
    std::string line;
    REQUIRE(std::getline(in, line));
    const auto doc = nlohmann::json::parse(line);
    CHECK(doc.contains("tokens"));
    CHECK(doc["tokens"].is_array());
  }

  REQUIRE(run("select --input " + prepped + " --out-dir " + (dir.path / "sel").string()) == 0);
  for (const char* name : {"vocabulary.txt", "matrix.txt", "ig_report.csv", "features.csv"})
    CHECK(fs::exists(dir.path / "sel" / name));

  REQUIRE(run("train --input " + prepped + " --out-dir " + (dir.path / "model").string() +
              " --spec nb --features " + (dir.path / "sel" / "features.csv").string()) == 0);
  CHECK(fs::exists(dir.path / "model" / "model.json"));

  REQUIRE(run("evaluate --input " + prepped + " --out-dir " + (dir.path / "eval").string() +
              " --spec dt --k 5 --features " + (dir.path / "sel" / "features.csv").string()) == 0);
  CHECK(fs::exists(dir.path / "eval" / "eval.json"));
  CHECK(fs::exists(dir.path / "eval" / "eval.csv"));
}

TEST_CASE("cli: pipeline subcommand with config file and overrides") {
  TempDir dir;
  const auto corpus = (dir.path / "corpus.jsonl").string();
  REQUIRE(run("synth --out " + corpus + " --docs 200 --yes 120 --fillers 20 --seed 3") == 0);

  nlohmann::json cfg;
  cfg["corpus_path"] = corpus;
  cfg["output_dir"] = (dir.path / "ignored").string();
  cfg["scheme"] = "two";
  cfg["wrapper_spec"] = {{"kind", "nb"}};
  cfg["final_spec"] = {{"kind", "dt"}};
  cfg["cv_k"] = 5;
  const auto cfg_path = (dir.path / "config.json").string();
  std::ofstream(cfg_path) << cfg.dump(2);

  REQUIRE(run("pipeline --config " + cfg_path + " --output-dir " + (dir.path / "out").string() +
              " --seed 9") == 0);
  for (const char* name :
       {"manifest.json", "ig_report.csv", "selection_trace.csv", "eval.json", "eval.csv"})
    CHECK(fs::exists(dir.path / "out" / name));

  const auto manifest = nlohmann::json::parse(slurp(dir.path / "out" / "manifest.json"));
  CHECK(manifest["config"]["seed"] == 9);  // flag beats file
  CHECK(manifest["config"]["output_dir"] == (dir.path / "out").string());
}

TEST_CASE("cli: matrix emit-grid and combined summary") {
  TempDir dir;
  const auto corpus = (dir.path / "corpus.jsonl").string();
  REQUIRE(run("synth --out " + corpus + " --docs 60 --yes 36 --fillers 6 --seed 3") == 0);

  nlohmann::json base;
  base["corpus_path"] = corpus;
  base["output_dir"] = (dir.path / "base_out").string();
  base["cv_k"] = 3;
  const auto base_path = (dir.path / "base.json").string();
  std::ofstream(base_path) << base.dump(2);

  REQUIRE(run("matrix --config-dir " + (dir.path / "grid").string() + " --emit-grid " +
              base_path + " --out " + (dir.path / "summary.csv").string()) == 0);
  const auto summary = slurp(dir.path / "summary.csv");
  std::size_t lines = 0;
  for (const char c : summary) lines += (c == '\n');
  CHECK(lines == 25);
}

TEST_CASE("cli: failures exit nonzero with a diagnostic") {
  CHECK(run("pipeline --config /nonexistent/config.json") != 0);
  CHECK(run("ingest --input /nonexistent.jsonl --out /tmp/x.jsonl") != 0);
  CHECK(run("definitely-not-a-subcommand") != 0);
  CHECK(run("--version") == 0);
}
