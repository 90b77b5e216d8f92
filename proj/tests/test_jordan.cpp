#include <gtest/gtest.h>

#include <complex>

#include "linflow/linflow.hpp"
#include "spec_gen.hpp"

using namespace linflow;
using linflow::testing::random_spec;

namespace {

// Independent oracle: rank of (M - lambda I)^k in double precision through a
// full-pivot LU. Only used on small integer matrices where this is exact.
std::vector<int> rank_sequence(const Eigen::MatrixXcd& M, std::complex<double> lambda, int kmax) {
  const auto n = M.rows();
  Eigen::MatrixXcd B = M - lambda * Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Identity(n, n);
  std::vector<int> out;
  for (int k = 1; k <= kmax; ++k) {
    P = P * B;
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(P);
    lu.setThreshold(1e-9);
    out.push_back(static_cast<int>(lu.rank()));
  }
  return out;
}

Eigen::MatrixXcd as_complex(const Eigen::MatrixXd& M) { return M.cast<std::complex<double>>(); }

RationalMatrix from_rows(std::vector<std::vector<Rational>> rows) {
  RationalMatrix M(static_cast<int>(rows.size()));
  for (int i = 0; i < M.dim(); ++i)
    for (int j = 0; j < M.dim(); ++j) M(i, j) = rows[i][j];
  return M;
}

}  // namespace

TEST(Rational, ReducesAndParses) {
  Rational r(6, -8);
  EXPECT_EQ(r.str(), "-3/4");
  EXPECT_EQ(Rational::parse("10/4"), Rational(5, 2));
  EXPECT_EQ(Rational::parse("-7"), Rational(-7));
  EXPECT_EQ(Rational::parse("+3/9").str(), "1/3");
  for (const char* bad : {"", "1/0", "abc", "1/", "/2", "1.5", "1/-2", "--1"})
    EXPECT_THROW(Rational::parse(bad), std::invalid_argument) << bad;
}

TEST(Rational, BestApproximation) {
  EXPECT_EQ(best_rational(0.5, 1024), Rational(1, 2));
  EXPECT_EQ(best_rational(-1.0 / 3.0 + 1e-13, 1024), Rational(-1, 3));
  EXPECT_EQ(best_rational(355.0 / 113.0, 1024), Rational(355, 113));
  // pi at bound 100 is the semiconvergent 311/99
  EXPECT_EQ(best_rational(3.14159265358979, 100), Rational(311, 99));
}

TEST(SpecParse, Examples) {
  auto s = parse_spec(R"({"blocks":[{"m":2,"re":-1,"im":0}]})");
  EXPECT_EQ(s, GeneratorSpec({JordanBlock(2, -1)}));
  EXPECT_EQ(dim(s), 2);

  auto r = parse_spec(R"({"blocks":[{"m":1,"re":0,"im":-3}]})");
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r.blocks()[0].im, Rational(3));
  EXPECT_EQ(dim(r), 2);

  EXPECT_EQ(dim(parse_spec(R"({"blocks":[{"m":3,"re":"1/2","im":2}]})")), 6);
}

TEST(SpecParse, ImDefaultsToZero) {
  EXPECT_EQ(parse_spec(R"({"blocks":[{"m":1,"re":"4/6"}]})"), GeneratorSpec({JordanBlock(1, Rational(2, 3))}));
}

TEST(SpecParse, ErrorsNameTheField) {
  auto where = [](const std::string& doc) {
    try {
      parse_spec(doc);
    } catch (const ParseError& e) {
      return e.where();
    }
    return std::string("<no error>");
  };
  EXPECT_EQ(where(R"({"blocks":[{"m":1,"re":"1/0"}]})"), "blocks[0].re");
  EXPECT_EQ(where(R"({"blocks":[{"m":1,"re":0},{"m":-2,"re":0}]})"), "blocks[1].m");
  EXPECT_EQ(where(R"({"blocks":[{"m":1,"re":0,"re":1}]})"), "re");
  EXPECT_EQ(where(R"({"blocks":[{"m":1,"re":0,"colour":1}]})"), "blocks[0].colour");
  EXPECT_EQ(where(R"({"blocks":[{"m":1,"re":1.5}]})"), "blocks[0].re");
  EXPECT_NE(where(R"({"blocks":[{"m":1,"re":0})"), "<no error>");
  EXPECT_NE(where(R"({"blocks":[]})"), "<no error>");
  try {
    parse_spec(R"({"blocks":[{"m":-2,"re":0}]})");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("negative block size"), std::string::npos);
  }
}

TEST(SpecParse, SyntaxErrorReportsLine) {
  try {
    parse_spec("{\n\"blocks\": [\n{\"m\": 1, \"re\": }\n]}");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(SpecParse, SerializeRoundTrip) {
  Sampler rng(11);
  for (int i = 0; i < 300; ++i) {
    auto s = random_spec(rng);
    EXPECT_EQ(parse_spec(serialize_spec(s)), s);
  }
}

TEST(SpecDim, Examples) {
  for (int d = 1; d <= 6; ++d) EXPECT_EQ(dim(GeneratorSpec({JordanBlock(d, -1)})), d);
  EXPECT_EQ(dim(GeneratorSpec({JordanBlock(1, 0, 1)})), 2);
  EXPECT_EQ(dim(GeneratorSpec({JordanBlock(2, -1, 1), JordanBlock(1, 0, 0)})), 5);
}

TEST(SpecEquality, OrderInsensitive) {
  GeneratorSpec a({JordanBlock(1, 2), JordanBlock(2, -1, 3)});
  GeneratorSpec b({JordanBlock(2, -1, -3), JordanBlock(1, 2)});
  EXPECT_EQ(a, b);
  EXPECT_NE(a, GeneratorSpec({JordanBlock(1, 2), JordanBlock(1, -1, 3), JordanBlock(1, -1, 3)}));
}

TEST(ScaleSpec, Examples) {
  EXPECT_EQ(scale_spec({JordanBlock(1, 1, 2)}, -1), GeneratorSpec({JordanBlock(1, -1, 2)}));
  EXPECT_EQ(scale_spec({JordanBlock(2, -1)}, 3), GeneratorSpec({JordanBlock(2, -3)}));
  GeneratorSpec s{JordanBlock(2, Rational(1, 3), 5), JordanBlock(1, 0)};
  EXPECT_EQ(scale_spec(s, 1), s);
  EXPECT_THROW(scale_spec(s, 0), PreconditionError);
}

TEST(ScaleSpec, ThreeTimesJ2MatchesRankSequence) {
  // 3 * J_2(-1) and J_2(-3) share their rank sequences at -3
  Eigen::MatrixXd A(2, 2);
  A << -1, 1, 0, -1;
  auto lhs = rank_sequence(as_complex(3.0 * A), -3.0, 3);
  auto rhs = rank_sequence(as_complex(materialize(scale_spec({JordanBlock(2, -1)}, 3)).to_eigen()), -3.0, 3);
  EXPECT_EQ(lhs, rhs);
  EXPECT_EQ(lhs, (std::vector<int>{1, 0, 0}));
}

TEST(ScaleSpec, Properties) {
  Sampler rng(5);
  for (int i = 0; i < 200; ++i) {
    auto s = random_spec(rng);
    Rational alpha = linflow::testing::random_rational(rng, 16, 4);
    if (alpha.is_zero()) continue;
    auto t = scale_spec(s, alpha);
    EXPECT_EQ(dim(t), dim(s));
    EXPECT_EQ(scale_spec(t, Rational(1) / alpha), s);
  }
}

TEST(TimeReverse, Examples) {
  EXPECT_EQ(time_reverse({JordanBlock(1, -2), JordanBlock(1, -1)}), GeneratorSpec({JordanBlock(1, 2), JordanBlock(1, 1)}));
  EXPECT_EQ(time_reverse({JordanBlock(1, 0, 5)}), GeneratorSpec({JordanBlock(1, 0, 5)}));
  Sampler rng(8);
  for (int i = 0; i < 50; ++i) {
    auto s = random_spec(rng);
    EXPECT_EQ(time_reverse(time_reverse(s)), s);
  }
}

TEST(Realify, Examples) {
  EXPECT_EQ(realify({ComplexBlock{1, 0, 1}}), GeneratorSpec({JordanBlock(1, 0, 1)}));
  EXPECT_EQ(realify({ComplexBlock{2, -1, 0}}), GeneratorSpec({JordanBlock(2, -1), JordanBlock(2, -1)}));
  EXPECT_TRUE(realify({}).empty());
  EXPECT_EQ(realify({ComplexBlock{3, 2, -4}, ComplexBlock{1, 0, 0}}).dim(), 8);
}

TEST(Realify, BruteForceComplexJ2) {
  // Realify C = J_2(-1) on C^2 as [[Re C, -Im C], [Im C, Re C]].
  Eigen::MatrixXd C(2, 2);
  C << -1, 1, 0, -1;
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(4, 4);
  R.topLeftCorner(2, 2) = C;
  R.bottomRightCorner(2, 2) = C;
  auto brute = rank_sequence(as_complex(R), -1.0, 3);
  auto ours = rank_sequence(as_complex(materialize(realify({ComplexBlock{2, -1, 0}})).to_eigen()), -1.0, 3);
  EXPECT_EQ(brute, ours);
  EXPECT_EQ(brute, (std::vector<int>{2, 0, 0}));
}

TEST(Materialize, Examples) {
  EXPECT_EQ(materialize({JordanBlock(2, 0)}), from_rows({{0, 1}, {0, 0}}));
  EXPECT_EQ(materialize({JordanBlock(1, 0, 1)}), from_rows({{0, -1}, {1, 0}}));
  EXPECT_EQ(materialize({JordanBlock(1, 5)}), from_rows({{5}}));
}

TEST(Materialize, RankSequencesMatchBlocks) {
  Sampler rng(21);
  for (int it = 0; it < 60; ++it) {
    auto s = random_spec(rng, 7);
    Eigen::MatrixXcd M = as_complex(materialize(s).to_eigen());
    for (const auto& b : s.blocks()) {
      std::complex<double> lam(b.re.to_double(), b.im.to_double());
      std::vector<int> expect;
      for (int k = 1; k <= 4; ++k) {
        int nullity = 0;
        for (const auto& c : s.blocks())
          if (c.re == b.re && c.im == b.im) nullity += std::min(k, c.m);
        expect.push_back(M.rows() - nullity);
      }
      EXPECT_EQ(rank_sequence(M, lam, 4), expect) << serialize_spec(s);
    }
  }
}

TEST(Ingest, Examples) {
  auto d = spec_from_matrix(from_rows({{-2, 0}, {0, -1}}));
  EXPECT_EQ(d.spec, GeneratorSpec({JordanBlock(1, -2), JordanBlock(1, -1)}));
  EXPECT_LT(d.eigenvalue_residual, 1e-12);

  EXPECT_EQ(spec_from_matrix(from_rows({{0, -1}, {1, 0}})).spec, GeneratorSpec({JordanBlock(1, 0, 1)}));
  EXPECT_EQ(spec_from_matrix(from_rows({{-1, 1}, {0, -1}})).spec, GeneratorSpec({JordanBlock(2, -1)}));
}

TEST(Ingest, NonCanonicalBasis) {
  // P J P^-1 with P = [[1,1],[0,1]] keeps the Jordan structure
  auto a = spec_from_matrix(from_rows({{-1, 1}, {0, -1}}));
  auto b = spec_from_matrix(from_rows({{2, -1}, {1, 0}}));  // (x-1)^2, one block
  EXPECT_EQ(a.spec, GeneratorSpec({JordanBlock(2, -1)}));
  EXPECT_EQ(b.spec, GeneratorSpec({JordanBlock(2, 1)}));
  EXPECT_TRUE(b.exact);
}

TEST(Ingest, AmbiguousClusters) {
  auto M = from_rows({{0, 0}, {0, Rational(3, 2000000000)}});
  try {
    spec_from_matrix(M, {1e-9, 1024});
    FAIL();
  } catch (const IngestError& e) {
    EXPECT_EQ(e.kind(), IngestError::Kind::ClusterAmbiguity);
  }
}

TEST(Ingest, SnapFailure) {
  try {
    spec_from_matrix(from_rows({{0, 2}, {1, 0}}));  // eigenvalues +-sqrt(2)
    FAIL();
  } catch (const IngestError& e) {
    EXPECT_EQ(e.kind(), IngestError::Kind::SnapFailure);
  }
  try {
    spec_from_matrix(from_rows({{Rational(1, 2000)}}));
    FAIL();
  } catch (const IngestError& e) {
    EXPECT_EQ(e.kind(), IngestError::Kind::SnapFailure);
  }
}

TEST(Ingest, RoundTrip) {
  Sampler rng(99);
  for (int i = 0; i < 120; ++i) {
    auto s = random_spec(rng);
    auto a = spec_from_matrix(materialize(s));
    EXPECT_EQ(a.spec, s) << serialize_spec(s);
    EXPECT_TRUE(a.exact);
    EXPECT_EQ(a.eigenvalue_residual, 0.0);
  }
}

TEST(MatrixIO, RoundTrip) {
  auto M = materialize({JordanBlock(2, Rational(-1, 3), 2)});
  EXPECT_EQ(parse_matrix(matrix_to_json(M).dump()), M);
  EXPECT_THROW(parse_matrix(R"({"dim":2,"rows":[["1","2"]]})"), ParseError);
}
