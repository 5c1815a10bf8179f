#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "json_io.hpp"

namespace qmt {
namespace {

using io::json;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string fixture(const char* name) { return std::string(QMT_FIXTURE_DIR) + "/" + name; }

std::string temp_file(const std::string& name, const std::string& contents) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << contents;
  return path;
}

TEST(CliTest, ValidateExitCodes) {
  auto r = run({"validate", fixture("chain3.json")});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(json::parse(r.out)["valid"], true);
  r = run({"validate", fixture("failing_markov.json")});
  EXPECT_EQ(r.code, cli::kMarkovViolation);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["valid"], false);
  EXPECT_EQ(j["node"], "M");
  r = run({"validate", fixture("missing.json")});
  EXPECT_EQ(r.code, cli::kInputError);
  EXPECT_NE(r.err.find("ParseError"), std::string::npos);
}

TEST(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kInputError);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kInputError);
  EXPECT_EQ(run({"propagate", fixture("chain3.json"), "--mode", "threads"}).code, cli::kInputError);
  EXPECT_EQ(run({"--help"}).code, cli::kOk);
}

TEST(CliTest, PropagateChain) {
  const auto r = run({"propagate", fixture("chain3.json"), fixture("chain3_evidence.json")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto j = json::parse(r.out)["marginals"];
  ASSERT_EQ(j.size(), 3U);
  // x and z are independent coordinates: each keeps its own evidence, y stays vacuous.
  EXPECT_EQ(j["X"]["mass"].size(), 2U);
  EXPECT_EQ(j["Y"]["mass"].size(), 1U);
  EXPECT_EQ(j["Z"]["mass"][1]["mass"], 0.5);
}

TEST(CliTest, PropagateNodeSelectionAndTrace) {
  const std::string trace = ::testing::TempDir() + "qmt_trace.jsonl";
  const auto r = run({"propagate", fixture("star_diagnostic.json"), fixture("star_diagnostic_evidence.json"), "--node",
                      "dx", "--trace", trace});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(json::parse(r.out)["marginals"].size(), 1U);
  std::ifstream in(trace);
  int lines = 0;
  for (std::string line; std::getline(in, line);) {
    const auto e = json::parse(line);
    EXPECT_EQ(e["seq"], lines + 1);
    ++lines;
  }
  EXPECT_EQ(lines, 10);
}

TEST(CliTest, ConcurrentSeedsAgree) {
  const auto a = run({"propagate", fixture("star_diagnostic.json"), fixture("star_diagnostic_evidence.json"), "--mode",
                      "concurrent", "--seed", "1"});
  const auto b = run({"propagate", fixture("star_diagnostic.json"), fixture("star_diagnostic_evidence.json"), "--mode",
                      "concurrent", "--seed", "77"});
  const auto c = run({"propagate", fixture("star_diagnostic.json"), fixture("star_diagnostic_evidence.json")});
  ASSERT_EQ(a.code, cli::kOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
}

TEST(CliTest, OracleCheck) {
  const auto r = run({"oracle-check", fixture("star_diagnostic.json"), fixture("star_diagnostic_evidence.json")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["pass"], true);
  EXPECT_LE(j["max_deviation"].get<double>(), 1e-9);
  EXPECT_EQ(run({"oracle-check", fixture("failing_markov.json")}).code, cli::kMarkovViolation);
}

TEST(CliTest, OracleFrameTooLarge) {
  std::string frame;
  for (int i = 0; i < 20; ++i) frame += (i ? ", \"e" : "\"e") + std::to_string(i) + "\"";
  const auto path = temp_file("qmt_big.json", "{\"frame\": [" + frame + "], \"nodes\": {\"x\": [[" + frame +
                                                   "]]}, \"edges\": []}");
  const auto r = run({"oracle-check", path});
  EXPECT_EQ(r.code, cli::kInputError);
  EXPECT_NE(r.err.find("FrameTooLarge"), std::string::npos);
  EXPECT_EQ(run({"propagate", path}).code, cli::kOk);
}

TEST(CliTest, TotalConflict) {
  const auto ev = temp_file("qmt_conflict.json", R"([
    {"node": "X", "mass": [{"blocks": [["000", "001", "010", "011"]], "mass": 1}]},
    {"node": "X", "mass": [{"blocks": [["100", "101", "110", "111"]], "mass": 1}]}])");
  const auto r = run({"propagate", fixture("chain3.json"), ev});
  EXPECT_EQ(r.code, cli::kTotalConflict);
  EXPECT_NE(r.err.find("TotalConflict"), std::string::npos);
}

TEST(CliTest, SkipMarkovCheck) {
  EXPECT_EQ(run({"propagate", fixture("failing_markov.json")}).code, cli::kMarkovViolation);
  EXPECT_EQ(run({"propagate", fixture("failing_markov.json"), "--skip-markov-check"}).code, cli::kOk);
}

TEST(CliTest, TriangleIsNotATree) {
  const auto path = temp_file("qmt_triangle.json", R"({"frame": ["a", "b"],
    "nodes": {"p": [["a", "b"]], "q": [["a", "b"]], "r": [["a", "b"]]},
    "edges": [["p", "q"], ["q", "r"], ["r", "p"]]})");
  const auto r = run({"validate", path});
  EXPECT_EQ(r.code, cli::kInputError);
  EXPECT_NE(r.err.find("NotATree"), std::string::npos);
}

TEST(CliTest, ChainTraceHasSevenEvents) {
  const std::string trace = ::testing::TempDir() + "qmt_chain_trace.jsonl";
  const auto r = run({"propagate", fixture("chain3.json"), fixture("chain3_evidence.json"), "--trace", trace});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  std::ifstream in(trace);
  int lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 7);
}

TEST(CliTest, VacuousModel) {
  auto r = run({"propagate", fixture("chain3.json"), "--all"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  for (const auto& [id, m] : json::parse(r.out)["marginals"].items()) {
    ASSERT_EQ(m["mass"].size(), 1U) << id;
    EXPECT_EQ(m["mass"][0]["mass"], 1.0);
    EXPECT_EQ(m["mass"][0]["blocks"].size(), 2U);
  }
  r = run({"oracle-check", fixture("chain3.json")});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["max_deviation"], 0.0);
  for (const auto& [id, d] : j["deviations"].items()) EXPECT_EQ(d, 0.0) << id;
}

TEST(CliTest, OracleDeviationExitCode) {
  // A negative tolerance cannot be met, which exercises the deviation exit path.
  const auto r = run({"oracle-check", fixture("chain3.json"), "--tol", "-1"});
  EXPECT_EQ(r.code, cli::kDeviation);
  EXPECT_EQ(json::parse(r.out)["pass"], false);
}

TEST(CliTest, CanonicalizeIsStable) {
  const auto first = run({"canonicalize", fixture("star_diagnostic.json")});
  ASSERT_EQ(first.code, cli::kOk) << first.err;
  const auto path = temp_file("qmt_canon.json", first.out);
  EXPECT_EQ(run({"canonicalize", path}).out, first.out);
}

}  // namespace
}  // namespace qmt
