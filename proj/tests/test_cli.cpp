#include <doctest.h>

#include <sstream>

#include "test_util.hpp"
#include "webqa/cli.hpp"

using namespace webqa;

namespace {

struct outcome {
  int code;
  std::string out;
  std::string err;
};

outcome run(std::vector<std::string> args) {
  args.insert(args.begin(), "webqa");
  std::vector<const char *> argv;
  for (const auto &a : args)
    argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const std::string corpus = test_util::data_path("lincoln_corpus.jsonl");

} // namespace

TEST_CASE("usage errors") {
  CHECK(run({}).code == exit_usage);
  CHECK(run({"frobnicate"}).code == exit_usage);
  CHECK(run({"--help"}).code == exit_ok);
  CHECK(run({"ask"}).code == exit_usage);
  CHECK(run({"ask", "Who?", "--corpus", corpus, "--policy", "greedy"}).code == exit_usage);
  auto no_backend = run({"ask", "Who killed Abraham Lincoln?"});
  CHECK(no_backend.code == exit_usage);
  CHECK(no_backend.err.find("backend") != std::string::npos);
  auto no_n = run({"ask", "Who killed Abraham Lincoln?", "--corpus", corpus, "--policy", "random"});
  CHECK(no_n.code == exit_usage);
  auto no_models = run({"ask", "Who killed Abraham Lincoln?", "--corpus", corpus, "--policy",
                        "cost-benefit"});
  CHECK(no_models.code == exit_usage);
}

TEST_CASE("ask answers from a corpus or a saved index") {
  auto r = run({"ask", "Who killed Abraham Lincoln?", "--corpus", corpus, "--top", "3"});
  REQUIRE(r.code == exit_ok);
  CHECK(r.out.find("<LEFT> \"killed Abraham Lincoln\"") != std::string::npos);
  CHECK(r.out.find("status: ANSWERED") != std::string::npos);
  CHECK(r.out.find("1. John Wilkes Booth") != std::string::npos);
  CHECK(r.out.find("queries issued: 4") != std::string::npos);

  test_util::temp_dir dir;
  auto idx = dir.file("lincoln.idx");
  REQUIRE(run({"index", "--corpus", corpus, "--out", idx}).code == exit_ok);
  auto again = run({"ask", "Who killed Abraham Lincoln?", "--index", idx, "--policy",
                    "conjunctive"});
  CHECK(again.code == exit_ok);
  CHECK(again.out.find("queries issued: 1") != std::string::npos);
}

TEST_CASE("data errors") {
  test_util::temp_dir dir;
  CHECK(run({"index", "--corpus", dir.file("missing.jsonl"), "--out", dir.file("x")}).code ==
        exit_data);
  auto empty = dir.file("empty.jsonl");
  test_util::write_text(empty, "\n");
  auto r = run({"evaluate", "--dataset", empty, "--corpus", corpus});
  CHECK(r.code == exit_data);
  auto bad = dir.file("bad.jsonl");
  test_util::write_text(bad, "{\"question\": \"q\"}\n");
  CHECK(run({"evaluate", "--dataset", bad, "--corpus", corpus}).code == exit_data);
  CHECK(run({"ask", "?", "--corpus", corpus}).code == exit_data);
}

TEST_CASE("config file values are overridden by flags") {
  test_util::temp_dir dir;
  auto cfg = dir.file("webqa.json");
  test_util::write_text(cfg, "{\"backend\": {\"corpus\": \"" + corpus +
                                 "\"}, \"preferences\": {\"k\": 0.5}}");
  // k from the file is valid; the policy does not need it
  auto r = run({"ask", "Who killed Abraham Lincoln?", "--config", cfg});
  CHECK(r.code == exit_ok);
  auto bad = run({"ask", "Who killed Abraham Lincoln?", "--config", cfg, "--k", "0"});
  CHECK(bad.code == exit_usage);
  test_util::write_text(cfg, "{\"colour\": 1}");
  CHECK(run({"ask", "Who?", "--config", cfg}).code == exit_usage);
}

TEST_CASE("unreachable remote backend") {
  auto r = run({"ask", "Who killed Abraham Lincoln?", "--endpoint", "http://127.0.0.1:1/search"});
  CHECK(r.code == exit_backend);
  CHECK(r.out.find("BACKEND_ERROR") != std::string::npos);
}

TEST_CASE("train needs a data set for every budget") {
  test_util::temp_dir dir;
  auto runs = dir.file("runs.jsonl");
  test_util::write_text(runs, R"({"threshold":1,"features":{"x":1},"label":true}
{"threshold":2,"features":{"x":0},"label":false}
)");
  auto r = run({"train", "--runs", runs, "--kind", "thresholds", "--out", dir.file("e.json"),
                "--thresholds", "1,2,3"});
  CHECK(r.code == exit_data);
  CHECK(r.err.find("3") != std::string::npos);
  CHECK(run({"train", "--runs", runs, "--kind", "thresholds", "--out", dir.file("e.json"),
             "--thresholds", "1,2"})
            .code == exit_ok);
}

TEST_CASE("end to end on a small synthetic benchmark") {
  test_util::temp_dir dir;
  auto d = [&](const std::string &f) { return dir.file(f); };
  REQUIRE(run({"gen-bench", "--out-dir", dir.path(), "--facts", "60", "--seed", "3"}).code ==
          exit_ok);
  std::vector<std::string> be{"--corpus", d("corpus.jsonl"), "--jobs", "2"};
  auto with = [&](std::vector<std::string> a) {
    a.insert(a.end(), be.begin(), be.end());
    return run(a);
  };
  REQUIRE(with({"collect-runs", "--dataset", d("train.jsonl"), "--phase", "quality", "--out",
                d("quality.jsonl")})
              .code == exit_ok);
  REQUIRE(run({"train", "--runs", d("quality.jsonl"), "--kind", "quality-conj", "--out",
               d("conj.json")})
              .code == exit_ok);
  REQUIRE(run({"train", "--runs", d("quality.jsonl"), "--kind", "quality-phrasal", "--out",
               d("phrasal.json")})
              .code == exit_ok);
  std::vector<std::string> models{"--conj-model", d("conj.json"), "--phrasal-model",
                                  d("phrasal.json")};
  auto threshold_args = std::vector<std::string>{"collect-runs", "--dataset", d("train.jsonl"),
                                                 "--phase", "thresholds", "--out",
                                                 d("thresholds.jsonl")};
  threshold_args.insert(threshold_args.end(), models.begin(), models.end());
  REQUIRE(with(threshold_args).code == exit_ok);
  REQUIRE(run({"train", "--runs", d("thresholds.jsonl"), "--kind", "thresholds", "--out",
               d("ensemble.json"), "--min-leaf", "4"})
              .code == exit_ok);

  auto eval_args = std::vector<std::string>{"evaluate", "--dataset", d("test.jsonl"),
                                            "--policy", "cost-benefit", "--ensemble",
                                            d("ensemble.json"), "--out", d("report.jsonl")};
  eval_args.insert(eval_args.end(), models.begin(), models.end());
  auto ev = with(eval_args);
  REQUIRE(ev.code == exit_ok);
  CHECK(ev.out.find("cost-benefit-k10-c1") != std::string::npos);
  CHECK(test_util::read_text(d("report.jsonl")).find("\"records\"") != std::string::npos);

  auto sweep_args = std::vector<std::string>{"evaluate", "--dataset", d("test.jsonl"),
                                             "--sweep-n", "--ns", "1,3", "--seeds", "2"};
  sweep_args.insert(sweep_args.end(), models.begin(), models.end());
  auto sw = with(sweep_args);
  CHECK(sw.code == exit_ok);
  CHECK(sw.out.find("likelihood correct") != std::string::npos);
}
