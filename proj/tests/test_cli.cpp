#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

using namespace linflow;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
  json doc() const { return json::parse(out); }
};

Result run(std::vector<std::string> args) {
  std::ostringstream o, e;
  int c = cli::run(args, o, e);
  return {c, o.str(), e.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("linflow_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string file(const std::string& name, const std::string& body) {
    auto p = dir_ / name;
    std::ofstream(p) << body;
    return p.string();
  }

  fs::path dir_;
};

const char* kJ2m1 = R"({"blocks":[{"m":2,"re":-1}]})";
const char* kNegI2 = R"({"blocks":[{"m":1,"re":-1},{"m":1,"re":-1}]})";

}  // namespace

TEST_F(Cli, ClassifyHoelderYesWithUnitScaling) {
  auto a = file("a.json", kJ2m1), b = file("b.json", kNegI2);
  auto r = run({"classify", a, b, "--relation", "hoelder-equiv"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto v = verdict_from_json(r.doc());
  EXPECT_EQ(v.decision, Decision::Yes);
  ASSERT_TRUE(v.scaling);
  EXPECT_EQ(*v.scaling, Rational(1));
  EXPECT_FALSE(v.approximate);

  r = run({"classify", a, b, "--relation", "lip-equiv"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.doc()["decision"], "No");
}

TEST_F(Cli, ClassifyMatrixInputIsApproximate) {
  auto a = file("a.json", R"({"dim":2,"rows":[["-1","1"],["0","-1"]]})");
  auto b = file("b.json", kJ2m1);
  auto r = run({"classify", a, b, "--relation", "lin-equiv"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.doc()["decision"], "Yes");
  EXPECT_EQ(r.doc()["approximate"], true);
}

TEST_F(Cli, StrictUndecidedExitsFour) {
  // three-dimensional central flows without a Hoelder match are left open
  auto a = file("a.json", R"({"blocks":[{"m":1,"re":0},{"m":1,"re":0,"im":1}]})");
  auto b = file("b.json", R"({"blocks":[{"m":3,"re":0}]})");
  auto r = run({"classify", a, b, "--relation", "top-equiv"});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(r.doc()["decision"], "Undecided");
  EXPECT_EQ(run({"classify", a, b, "--relation", "top-equiv", "--strict"}).code, 4);
  // decided answers are unaffected by --strict
  EXPECT_EQ(run({"classify", a, a, "--relation", "top-equiv", "--strict"}).code, 0);
}

TEST_F(Cli, TransformL) {
  auto a = file("a.json", R"({"blocks":[{"m":1,"re":1,"im":1}]})");
  auto r = run({"transform", a, "--op", "L"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto s = spec_from_json(r.doc());
  EXPECT_EQ(s, GeneratorSpec({JordanBlock(1, 1), JordanBlock(1, 1)}));
}

TEST_F(Cli, TransformOps) {
  auto a = file("a.json", R"({"blocks":[{"m":2,"re":"1/2","im":3}]})");
  EXPECT_EQ(spec_from_json(run({"transform", a, "--op", "scale:-2"}).doc()),
            GeneratorSpec({JordanBlock(2, -1, 6)}));
  EXPECT_EQ(spec_from_json(run({"transform", a, "--op", "reverse"}).doc()),
            GeneratorSpec({JordanBlock(2, Rational(-1, 2), 3)}));
  EXPECT_EQ(spec_from_json(run({"transform", a, "--op", "K"}).doc()), GeneratorSpec({JordanBlock(2, Rational(1, 2)), JordanBlock(2, Rational(1, 2))}));
  auto c = file("c.json", R"({"blocks":[{"m":1,"re":2,"im":-5},{"m":1,"re":3}]})");
  EXPECT_EQ(spec_from_json(run({"transform", c, "--op", "realify"}).doc()),
            GeneratorSpec({JordanBlock(1, 2, 5), JordanBlock(1, 3), JordanBlock(1, 3)}));
  EXPECT_EQ(run({"transform", a, "--op", "flip"}).code, 1);
  EXPECT_EQ(run({"transform", a, "--op", "scale:x"}).code, 1);
}

TEST_F(Cli, InvariantsDocument) {
  auto a = file("a.json", R"({"blocks":[{"m":2,"re":-1},{"m":1,"re":-1}]})");
  auto r = run({"invariants", a});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = r.doc();
  EXPECT_EQ(j["dim"], 3);
  EXPECT_EQ(j["spectrum"], json({"-1", "-1", "-1"}));
  EXPECT_EQ(j["partition"]["d_S"], 3);
  EXPECT_EQ(j["distortion"]["dimension"], 2);
  EXPECT_EQ(j["approximate"], false);
  EXPECT_FALSE(j.contains("ingestion"));
  EXPECT_EQ(spec_from_json(j["lipschitz_transform"]), GeneratorSpec({JordanBlock(1, -1), JordanBlock(2, -1)}));

  auto u = file("u.json", R"({"blocks":[{"m":1,"re":1}]})");
  EXPECT_TRUE(run({"invariants", u}).doc()["distortion"].is_null());
}

TEST_F(Cli, InvariantsReportsIngestion) {
  auto a = file("a.json", R"({"dim":2,"rows":[["0","-2"],["2","0"]]})");
  auto r = run({"invariants", a});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = r.doc();
  EXPECT_EQ(j["approximate"], true);
  ASSERT_TRUE(j.contains("ingestion"));
  EXPECT_LT(j["ingestion"]["eigenvalue_residual"].get<double>(), 1e-9);
}

TEST_F(Cli, Catalog2d) {
  auto a = file("a.json", R"({"blocks":[{"m":1,"re":-3},{"m":1,"re":-3}]})");
  auto r = run({"catalog2d", a, "--relation", "similar"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(spec_from_json(r.doc()["representative"]), GeneratorSpec({JordanBlock(1, 1), JordanBlock(1, 1)}));
  EXPECT_EQ(r.doc()["scaling"], "-1/3");
  // alias spelling yields the same document
  EXPECT_EQ(run({"catalog2d", a, "--relation", "lin-equiv"}).out, r.out);
  EXPECT_EQ(run({"catalog2d", a, "--relation", "nearby"}).code, 1);
  auto b = file("b.json", R"({"blocks":[{"m":1,"re":-3}]})");
  EXPECT_EQ(run({"catalog2d", b, "--relation", "topological"}).code, 3);
}

TEST_F(Cli, SimulateCsv) {
  auto a = file("a.json", R"({"blocks":[{"m":1,"re":0,"im":1}]})");
  auto r = run({"simulate", a, "--x", "1,0", "--t0", "0", "--t1", "3.141592653589793", "--steps", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 6u);
  EXPECT_EQ(lines[0], "t,x1,x2");
  EXPECT_EQ(lines[1], "0,1,0");
  double t, x1, x2;
  char c;
  std::istringstream last(lines.back());
  last >> t >> c >> x1 >> c >> x2;
  EXPECT_NEAR(x1, -1.0, 1e-12);
  EXPECT_NEAR(x2, 0.0, 1e-12);
}

TEST_F(Cli, VerifyConstructions) {
  auto r = run({"verify", "--construction", "h_a:0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LT(r.doc()["conjugacy"]["estimate"].get<double>(), 1e-9);
  EXPECT_LT(r.doc()["inverse"]["estimate"].get<double>(), 1e-9);

  auto s = file("s.json", R"({"blocks":[{"m":1,"re":-1},{"m":1,"re":2}]})");
  r = run({"verify", "--construction", "pw-hyp", "--spec", s, "--samples", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LT(r.doc()["conjugacy"]["estimate"].get<double>(), 1e-6);
  EXPECT_EQ(r.doc()["lipschitz"]["pointwise_trend"], "bounded");

  r = run({"verify", "--construction", "lem66:2,-1,1", "--samples", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_TRUE(r.doc().contains("witness_slope"));
  EXPECT_NEAR(r.doc()["witness_slope"]["estimate"].get<double>(), 1.0, 0.2);
}

TEST_F(Cli, VerifyUsageAndPreconditions) {
  EXPECT_EQ(run({"verify", "--construction", "pw-hyp"}).code, 1);
  EXPECT_EQ(run({"verify", "--construction", "teleport"}).code, 1);
  EXPECT_EQ(run({"verify", "--construction", "lem66:1.5,0,0"}).code, 1);
  EXPECT_EQ(run({"verify", "--construction", "h_a:abc"}).code, 2);
  auto central = file("c.json", R"({"blocks":[{"m":1,"re":0,"im":1}]})");
  auto r = run({"verify", "--construction", "pw-hyp", "--spec", central});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("precondition"), std::string::npos);
}

TEST_F(Cli, AuditHasNoViolations) {
  auto a = file("a.json", kJ2m1), b = file("b.json", kNegI2);
  auto r = run({"audit", a, b});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = r.doc();
  EXPECT_TRUE(j["violations"].empty());
  EXPECT_EQ(j["verdicts"].size(), kAllRelations.size());
  EXPECT_EQ(j["verdicts"]["hoelder-equiv"]["decision"], "Yes");
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  auto a = file("a.json", kJ2m1);
  EXPECT_EQ(run({"invariants", a, "--colour", "red"}).code, 1);
  EXPECT_EQ(run({"classify", a, a}).code, 1);
  EXPECT_EQ(run({"classify", a, a, "--relation", "similar-ish"}).code, 1);
  EXPECT_EQ(run({"simulate", a, "--x", "1,0", "--steps", "0"}).code, 1);
  auto h = run({"--help"});
  EXPECT_EQ(h.code, 0);
  EXPECT_NE(h.out.find("classify"), std::string::npos);
}

TEST_F(Cli, ParseAndIngestErrors) {
  auto missing = (dir_ / "nope.json").string();
  auto r = run({"invariants", missing});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("parse error"), std::string::npos);

  auto bad = file("bad.json", R"({"blocks":[{"m":1,"re":0})");
  EXPECT_EQ(run({"invariants", bad}).code, 2);
  auto field = file("field.json", R"({"blocks":[{"m":0,"re":0}]})");
  r = run({"invariants", field});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("blocks[0].m"), std::string::npos);

  // eigenvalues +-sqrt(2) have no small-denominator rational snap
  auto irr = file("irr.json", R"({"dim":2,"rows":[["0","1"],["2","0"]]})");
  r = run({"invariants", irr});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("ingestion"), std::string::npos);

  auto a = file("a.json", kJ2m1);
  EXPECT_EQ(run({"simulate", a, "--x", "1,zero"}).code, 2);
}

TEST_F(Cli, PreconditionErrors) {
  auto a = file("a.json", kJ2m1);
  EXPECT_EQ(run({"simulate", a, "--x", "1,0,0"}).code, 3);
  EXPECT_EQ(run({"simulate", a, "--x", "1,0", "--t1", "5000"}).code, 3);
}
