#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include "doctest.h"
#include "morl/experiments.hpp"
#include "test_util.hpp"

using namespace morl;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run_cli(const std::string& args, const fs::path& scratch) {
  const fs::path out = scratch / "stdout.txt", err = scratch / "stderr.txt";
  const std::string cmd = std::string("\"") + MORL_CLI_PATH + "\" " + args + " >\"" + out.string() +
                          "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_text_file(out);
  r.err = read_text_file(err);
  return r;
}

void write_config(const fs::path& path, const json& doc) { std::ofstream(path) << doc.dump(2); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("run writes logs, aggregates and the echoed config") {
    test::TempDir dir("cli-run");
    const fs::path out = dir.path() / "out";
    write_config(dir.path() / "c.json", json{{"env", "dst"}, {"T", 3}, {"N", 4}, {"runs", 2}});
    const Result r = run_cli("run --config \"" + (dir.path() / "c.json").string() + "\" --seed 5 --out \"" +
                                 out.string() + "\"",
                             dir.path());
    CHECK(r.code == 0);
    CHECK(r.out.find("final median f") != std::string::npos);
    for (const char* f : {"config.json", "manifest.json", "quantiles.csv", "gap.csv", "run_000/log.csv",
                          "run_001/final.json"}) {
      CHECK(fs::exists(out / f));
    }
    const json echoed = json::parse(read_text_file(out / "config.json"));
    CHECK(echoed.at("experiment").at("seed") == 5);
    CHECK(echoed.at("hyper").at("T") == 3);
  }

  TEST_CASE("compare refuses unequal budgets") {
    test::TempDir dir("cli-cmp");
    write_config(dir.path() / "c.json",
                 json{{"env", "dst"}, {"T", 3}, {"compare", {{"mo-pg", {{"N", 10}}}}}});
    const Result r = run_cli("compare --config \"" + (dir.path() / "c.json").string() + "\" --out \"" +
                                 (dir.path() / "out").string() + "\"",
                             dir.path());
    CHECK(r.code == 2);
    CHECK(r.err.find("refusing to compare: episode budgets differ") != std::string::npos);
    CHECK(r.err.find("= 20 vs") != std::string::npos);
    CHECK_FALSE(fs::exists(dir.path() / "out" / "mo-pg"));
  }

  TEST_CASE("compare under a matched budget") {
    test::TempDir dir("cli-cmp-ok");
    write_config(dir.path() / "c.json",
                 json{{"env", "dst"},
                      {"T", 2},
                      {"compare", {{"mo-pg", {{"N", 8}}}, {"mo-tsivr-pg", {{"N", 4}, {"B", 2}, {"m", 3}}}}}});
    const fs::path out = dir.path() / "out";
    const Result r = run_cli("compare --config \"" + (dir.path() / "c.json").string() + "\" --out \"" +
                                 out.string() + "\"",
                             dir.path());
    CHECK(r.code == 0);
    const json summary = json::parse(read_text_file(out / "compare.json"));
    CHECK(summary.at("episodes_per_epoch") == 16);
    CHECK(fs::exists(out / "mo-pg" / "run_000" / "log.csv"));
    CHECK(fs::exists(out / "mo-tsivr-pg" / "run_000" / "log.csv"));
  }

  TEST_CASE("configuration mistakes exit with code 2") {
    test::TempDir dir("cli-bad");
    write_config(dir.path() / "c.json", json{{"env", "dst"}, {"batchsize", 4}});
    const Result r = run_cli("run --config \"" + (dir.path() / "c.json").string() + "\"", dir.path());
    CHECK(r.code == 2);
    CHECK(r.err.find("did you mean 'N'?") != std::string::npos);

    // Missing config file.
    CHECK(run_cli("run --config \"" + (dir.path() / "none.json").string() + "\"", dir.path()).code != 0);

    write_config(dir.path() / "p.json", json{{"env", "server-queues"}, {"N", 3}});
    const Result q = run_cli("run --config \"" + (dir.path() / "p.json").string() +
                                 "\" --preset thm2 --eps 0.5",
                             dir.path());
    CHECK(q.code == 2);
    CHECK(q.err.find("preset") != std::string::npos);
  }

  TEST_CASE("a subcommand is required") {
    test::TempDir dir("cli-none");
    CHECK(run_cli("", dir.path()).code != 0);
    CHECK(run_cli("--help", dir.path()).code == 0);
  }
}
