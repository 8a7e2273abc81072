#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "testutil.hpp"

using namespace metastab;

TEST_CASE("family_sample validates members and answers lookups") {
  std::vector<exact_sequence> ms;
  ms.emplace_back(std::vector<rational>{rational(0), rational(1)}, source_kind::closed_form, "a");
  ms.emplace_back(std::vector<rational>{rational(2), rational(3)}, source_kind::closed_form, "b");
  family_sample<rational> fam(ms, "two");
  REQUIRE(fam.size() == 2);
  REQUIRE(fam.horizon() == 2);
  REQUIRE(fam.provenance() == "two");
  REQUIRE(fam.member(1).label() == "b");
  REQUIRE(fam.index_of("b") == 1);
  REQUIRE_FALSE(fam.index_of("c").has_value());
  REQUIRE_THROWS_AS(fam.member(2), lookup_error);

  ms.emplace_back(std::vector<rational>{rational(0)}, source_kind::closed_form, "short");
  REQUIRE_THROWS_AS(family_sample<rational>(ms, "bad"), config_error);
  REQUIRE_THROWS_AS(family_sample<rational>({}, "empty"), config_error);
}

TEST_CASE("monotone01 family enumerates every single-flip 0/1 sequence") {
  family_spec<rational> fam = gen_monotone01(4);
  REQUIRE_FALSE(fam.has_adversary());
  REQUIRE(fam.sample.size() == 8);
  REQUIRE(fam.sample.horizon() == 4);
  REQUIRE(fam.sample.provenance() == "monotone01(H=4)");
  // up@t: 0 before t, 1 from t on; up@0 is the constant 1
  auto vals = [&](const char* label) {
    auto i = fam.sample.index_of(label);
    REQUIRE(i);
    return fam.sample.member(*i).values();
  };
  REQUIRE(vals("up@0") == std::vector<rational>{1, 1, 1, 1});
  REQUIRE(vals("up@2") == std::vector<rational>{0, 0, 1, 1});
  REQUIRE(vals("const0") == std::vector<rational>{0, 0, 0, 0});
  REQUIRE(vals("down@3") == std::vector<rational>{1, 1, 1, 0});
  REQUIRE_THROWS_AS(gen_monotone01(0), config_error);

  // exhaustiveness: all 2H members distinct
  for (std::size_t i = 0; i < fam.sample.size(); ++i)
    for (std::size_t j = i + 1; j < fam.sample.size(); ++j)
      REQUIRE(fam.sample.member(i).values() != fam.sample.member(j).values());
}

TEST_CASE("alternating family answers claimed bounds with its own member") {
  family_spec<rational> fam = gen_eventually_zero_alternating(20, 64);
  REQUIRE(fam.has_adversary());
  REQUIRE(fam.sample.size() == 11);  // p = 0, 2, ..., 20
  REQUIRE(fam.sample.provenance() == "eventually-zero-alternating(P=20, H=64)");
  auto alt8 = fam.sample.member(*fam.sample.index_of("alt@8"));
  REQUIRE(alt8.values()[1] == rational(1));
  REQUIRE(alt8.values()[7] == rational(1));
  REQUIRE(alt8.values()[8] == rational(0));
  REQUIRE(alt8.values()[63] == rational(0));

  auto mv = fam.adversary(rational(1, 2), 3);
  REQUIRE(mv);
  REQUIRE(mv->member_index == 4);  // prefix length 2*3+2 = 8 lives at index 4
  REQUIRE(mv->eta == pairs_sampling(3));
  // every answered level oscillates by 1, so the move defeats the bound
  auto x = fam.sample.member(mv->member_index);
  for (std::size_t m = 0; m < 3; ++m)
    REQUIRE(oscillation(x, mv->eta.level(m)) == rational(1));

  REQUIRE_FALSE(fam.adversary(rational(1, 2), 10));  // needs prefix 22 > 20
  REQUIRE_FALSE(fam.adversary(rational(2), 1));      // 0/1 values never reach eps 2
  REQUIRE_THROWS_AS(gen_eventually_zero_alternating(64, 64), config_error);
}

TEST_CASE("cesaro family holds running averages of the base expression") {
  family_spec<rational> fam = gen_cesaro(parse_sequence_expr("mod(n, 2)"), 8, "mod(n, 2)");
  REQUIRE(fam.sample.size() == 1);
  REQUIRE(fam.sample.provenance() == "cesaro(H=8, base=mod(n, 2))");
  const auto& v = fam.sample.member(0).values();
  REQUIRE(v[0] == rational(0));
  REQUIRE(v[1] == rational(1, 2));
  REQUIRE(v[2] == rational(1, 3));
  REQUIRE(v[3] == rational(1, 2));
  REQUIRE(v[4] == rational(2, 5));
  // averages of mod(n,2) settle toward 1/2: frozen Cauchy index at eps 1/10
  family_spec<rational> big = gen_cesaro(parse_sequence_expr("mod(n, 2)"), 128);
  REQUIRE(cauchy_index(big.sample.member(0), rational(1, 10)) == 5);
}

TEST_CASE("expression families evaluate each member exactly") {
  std::vector<expr> es = {parse_sequence_expr("1/2^n"), parse_sequence_expr("(-1)^n")};
  family_spec<rational> fam = gen_from_exprs(es, 5);
  REQUIRE(fam.sample.size() == 2);
  REQUIRE(fam.sample.member(0).label() == "expr@0");
  REQUIRE(fam.sample.member(0).values() ==
          std::vector<rational>{rational(1), rational(1, 2), rational(1, 4), rational(1, 8),
                                rational(1, 16)});
  REQUIRE(fam.sample.member(1).values()[3] == rational(-1));
  REQUIRE_THROWS_AS(gen_from_exprs({}, 5), config_error);
  REQUIRE_THROWS_AS(gen_from_exprs(es, 0), config_error);
}

TEST_CASE("trace ingestion reads CSV rows as float64 members") {
  std::stringstream ss("\n0.5, 0.25, 0.125\n1, 1, 1\n");
  family_spec<double> fam = ingest_trace(ss, "solver.csv");
  REQUIRE(fam.sample.size() == 2);
  REQUIRE(fam.sample.horizon() == 3);
  REQUIRE(fam.sample.provenance() == "trace(solver.csv)");
  REQUIRE(fam.sample.member(0).label() == "row@0");
  REQUIRE(fam.sample.member(0).kind() == source_kind::trace);
  REQUIRE(fam.sample.member(0).values() == std::vector<double>{0.5, 0.25, 0.125});
  REQUIRE_FALSE(fam.has_adversary());
}

TEST_CASE("trace ingestion reports precise row/column errors") {
  auto ingest = [](const char* text) {
    std::stringstream ss(text);
    return ingest_trace(ss, "t");
  };
  REQUIRE_THROWS_AS(ingest(""), config_error);
  REQUIRE_THROWS_AS(ingest("\n\n"), config_error);
  try {
    ingest("1,2\n3\n");
    FAIL("expected ragged-row error");
  } catch (const ingest_error& e) {
    REQUIRE(e.row() == 2);
  }
  try {
    ingest("1,2\n3,x\n");
    FAIL("expected bad-cell error");
  } catch (const ingest_error& e) {
    REQUIRE(e.row() == 2);
    REQUIRE(e.column() == 2);
  }
  // blank line inside the data block is an error, not a separator
  REQUIRE_THROWS_AS(ingest("1,2\n\n3,4\n"), ingest_error);
}
