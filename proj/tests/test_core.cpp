#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "testutil.hpp"

using namespace metastab;

TEST_CASE("index_set sorts, dedups and answers queries") {
  index_set s(std::vector<std::size_t>{5, 2, 9, 2, 5});
  REQUIRE(s.size() == 3);
  REQUIRE(s.min() == 2);
  REQUIRE(s.max() == 9);
  REQUIRE(s.values() == std::vector<std::size_t>{2, 5, 9});
  REQUIRE(s.contains(5));
  REQUIRE_FALSE(s.contains(3));
  REQUIRE(index_set{2, 9}.subset_of(s));
  REQUIRE_FALSE(s.subset_of(index_set{2, 9}));
  REQUIRE(index_set{}.empty());
  REQUIRE(index_set{}.subset_of(s));
}

TEST_CASE("sampling_prefix enforces validity") {
  REQUIRE_THROWS_AS(sampling_prefix(std::vector<index_set>{}), config_error);
  // level 1 may not contain 0
  REQUIRE_THROWS_AS(sampling_prefix({index_set{0}, index_set{0, 2}}), config_error);
  sampling_prefix ok({index_set{0, 3}, index_set{}, index_set{5}});
  REQUIRE(ok.length() == 3);
  REQUIRE(ok.max_index() == 5);
  REQUIRE(ok.max_eta0() == 3);
  REQUIRE(ok.level(1).empty());
  REQUIRE_THROWS_AS(ok.level(3), lookup_error);
  REQUIRE(sampling_prefix({index_set{}}).max_index() == 0);
  REQUIRE(sampling_prefix({index_set{}}).max_eta0() == 0);
}

TEST_CASE("sampling generators have the documented shapes") {
  sampling_prefix p = pairs_sampling(3);
  REQUIRE(p.length() == 3);
  REQUIRE(p.level(2) == index_set{2, 3});
  REQUIRE(p.max_index() == 3);

  sampling_prefix iv = interval_sampling(2, 4);
  REQUIRE(iv.length() == 4);
  REQUIRE(iv.level(3) == index_set{3, 4, 5});

  sampling_prefix st = straddle_sampling(4);
  REQUIRE(st.length() == 5);  // default length center+1
  REQUIRE(st.level(0) == index_set{0, 4});
  REQUIRE(st.level(4) == index_set{4});

  sampling_prefix st2 = straddle_sampling(2, 5);
  REQUIRE(st2.level(1) == index_set{1, 2});
  REQUIRE(st2.level(4) == index_set{4});

  REQUIRE_THROWS_AS(pairs_sampling(0), config_error);
  REQUIRE_THROWS_AS(interval_sampling(1, 0), config_error);
}

TEST_CASE("sampling JSON round-trips and rejects malformed input") {
  auto g = testutil::rng(7);
  for (int i = 0; i < 25; ++i) {
    sampling_prefix eta = testutil::random_sampling(g, 12, 20);
    std::stringstream ss;
    save_sampling(ss, eta);
    REQUIRE(load_sampling(ss) == eta);
  }
  auto bad = [](const char* text) {
    std::stringstream ss(text);
    return load_sampling(ss);
  };
  REQUIRE_THROWS_AS(bad("{"), config_error);
  REQUIRE_THROWS_AS(bad("[]"), config_error);
  REQUIRE_THROWS_AS(bad("{\"levels\": 3}"), config_error);
  REQUIRE_THROWS_AS(bad("{\"levels\": [[0], 1]}"), config_error);
  REQUIRE_THROWS_AS(bad("{\"levels\": [[-1]]}"), config_error);
  REQUIRE_THROWS_AS(bad("{\"levels\": [[1], [0]]}"), config_error);  // invalid level
}

TEST_CASE("basic_sequence checks bounds and keeps metadata") {
  exact_sequence x({rational(1), rational(2)}, source_kind::closed_form, "pair");
  REQUIRE(x.horizon() == 2);
  REQUIRE(x.label() == "pair");
  REQUIRE(x.kind() == source_kind::closed_form);
  REQUIRE(x.at(1) == rational(2));
  REQUIRE_THROWS_AS(x.at(2), out_of_horizon_error);
  REQUIRE_THROWS_AS(exact_sequence({}, source_kind::trace), config_error);
  try {
    x.at(5);
    FAIL("expected throw");
  } catch (const out_of_horizon_error& e) {
    REQUIRE(e.index() == 5);
    REQUIRE(e.horizon() == 2);
  }
}

TEST_CASE("oscillation equals the naive all-pairs spread") {
  exact_sequence x({rational(0), rational(1), rational(1, 2), rational(-1, 3)},
                   source_kind::closed_form);
  REQUIRE(oscillation(x, index_set{}) == rational(0));
  REQUIRE(oscillation(x, index_set{2}) == rational(0));
  REQUIRE(oscillation(x, index_set{0, 1}) == rational(1));
  REQUIRE(oscillation(x, index_set{1, 3}) == rational(4, 3));
  REQUIRE_THROWS_AS(oscillation(x, index_set{4}), out_of_horizon_error);

  auto g = testutil::rng(11);
  for (int i = 0; i < 60; ++i) {
    auto vals = testutil::random_values(g, testutil::pick(g, 2, 24));
    exact_sequence s(vals, source_kind::closed_form);
    std::vector<std::size_t> ix;
    for (std::size_t k = 0, c = testutil::pick(g, 0, 6); k < c; ++k)
      ix.push_back(testutil::pick(g, 0, vals.size() - 1));
    REQUIRE(oscillation(s, index_set(ix)) == testutil::naive_osc(vals, ix));
  }
}

TEST_CASE("find_witness agrees with the naive level scan") {
  auto g = testutil::rng(13);
  exact_cmp cmp;
  for (int i = 0; i < 60; ++i) {
    auto vals = testutil::random_values(g, testutil::pick(g, 4, 32));
    exact_sequence s(vals, source_kind::closed_form);
    sampling_prefix eta = testutil::random_sampling(g, 10, vals.size());
    rational eps(testutil::pick(g, 1, 6), 4);
    auto lib = find_witness(s, eps, eta, cmp);
    auto naive = testutil::naive_witness(
        vals, eps, testutil::levels_of<rational>(eta),
        [&](const rational& a, const rational& b) { return cmp.less(a, b); });
    REQUIRE(lib.has_value() == naive.has_value());
    if (lib) {
      REQUIRE(lib->level == *naive);
      REQUIRE(lib->oscillation == testutil::naive_osc(vals, eta.level(*naive).values()));
    }
  }
}

TEST_CASE("cauchy_index matches the definition on frozen and random inputs") {
  // geometric (1/2)^n over 32 terms; spread of the tail from N is
  // (1/2)^N - (1/2)^31 and the first N with spread < 3/10 is 2.
  std::vector<rational> geo(32);
  for (std::size_t n = 0; n < 32; ++n) geo[n] = rational_pow(rational(1, 2), long(n));
  exact_sequence g32(geo, source_kind::expression, "geometric");
  REQUIRE(cauchy_index(g32, rational(3, 10)) == 2);
  REQUIRE(cauchy_informative(g32, 2));

  // alternating 0/1 never settles: only the singleton tail qualifies.
  std::vector<rational> alt(32);
  for (std::size_t n = 0; n < 32; ++n) alt[n] = rational(n % 2);
  exact_sequence a32(alt, source_kind::closed_form, "alternating");
  REQUIRE(cauchy_index(a32, rational(1, 2)) == 31);
  REQUIRE_FALSE(cauchy_informative(a32, 31));

  exact_sequence c5(std::vector<rational>(5, rational(7)), source_kind::closed_form);
  REQUIRE(cauchy_index(c5, rational(1, 100)) == 0);

  REQUIRE_THROWS_AS(cauchy_index(c5, rational(0)), config_error);
  REQUIRE_THROWS_AS(cauchy_index(c5, rational(-1)), config_error);

  auto rg = testutil::rng(17);
  for (int i = 0; i < 40; ++i) {
    auto vals = testutil::random_values(rg, testutil::pick(rg, 2, 20));
    exact_sequence s(vals, source_kind::closed_form);
    rational eps(testutil::pick(rg, 1, 5), 3);
    std::size_t n = cauchy_index(s, eps);
    auto tail_spread = [&](std::size_t from) {
      std::vector<std::size_t> ix;
      for (std::size_t k = from; k < vals.size(); ++k) ix.push_back(k);
      return testutil::naive_osc(vals, ix);
    };
    REQUIRE(tail_spread(n) < eps);
    if (n > 0) REQUIRE_FALSE(tail_spread(n - 1) < eps);
  }
}

TEST_CASE("refuting_sampling builds pair evidence that defeats find_witness") {
  std::vector<rational> alt(16);
  for (std::size_t n = 0; n < 16; ++n) alt[n] = rational(n % 2);
  exact_sequence a(alt, source_kind::closed_form);
  auto eta = refuting_sampling(a, rational(1, 2), 6);
  REQUIRE(eta);
  for (std::size_t m = 0; m < 6; ++m) REQUIRE(eta->level(m) == index_set{m, m + 1});
  REQUIRE_FALSE(find_witness(a, rational(1, 2), *eta));

  // a convergent sequence has no refuting prefix once the tail is quiet
  std::vector<rational> geo(16);
  for (std::size_t n = 0; n < 16; ++n) geo[n] = rational_pow(rational(1, 2), long(n));
  exact_sequence g(geo, source_kind::expression);
  REQUIRE_FALSE(refuting_sampling(g, rational(2), 1).has_value());
  REQUIRE_THROWS_AS(refuting_sampling(g, rational(1, 2), 0), config_error);

  // periodic sequences admit refuting prefixes at every length below half
  // the amplitude
  auto rg = testutil::rng(19);
  for (int i = 0; i < 30; ++i) {
    std::size_t period = testutil::pick(rg, 2, 5);
    std::vector<rational> pal = testutil::random_values(rg, period);
    if (*std::min_element(pal.begin(), pal.end()) == *std::max_element(pal.begin(), pal.end()))
      pal[0] += 1;
    std::vector<rational> vals(48);
    for (std::size_t n = 0; n < vals.size(); ++n) vals[n] = pal[n % period];
    exact_sequence s(vals, source_kind::closed_form);
    rational amp = *std::max_element(pal.begin(), pal.end()) -
                   *std::min_element(pal.begin(), pal.end());
    rational eps = amp / 3;
    for (std::size_t len : {std::size_t(1), std::size_t(8), std::size_t(20)}) {
      auto r = refuting_sampling(s, eps, len);
      REQUIRE(r);
      REQUIRE(r->length() == len);
      REQUIRE_FALSE(find_witness(s, eps, *r));
    }
  }
}

TEST_CASE("float64 lane treats values within tolerance as equal") {
  tol_cmp cmp{1e-6};
  REQUIRE(cmp.less(0.0, 1.0));
  REQUIRE_FALSE(cmp.less(1.0, 1.0 + 5e-7));  // inside tolerance: not less
  trace_sequence t({0.5, 0.5 + 4e-7, 0.5 - 4e-7}, source_kind::trace, "t");
  // spread 8e-7 is within tolerance, so it is a witness for any eps > tol
  auto w = find_witness(t, 1e-3, pairs_sampling(2), cmp);
  REQUIRE(w);
  REQUIRE(w->level == 0);
  // ... but an oscillation exactly at eps - tol/2 is not strictly below eps
  trace_sequence u({0.0, 1e-3 - 5e-7}, source_kind::trace, "u");
  REQUIRE_FALSE(find_witness(u, 1e-3, pairs_sampling(1), cmp));
}

TEST_CASE("rational parsing and printing") {
  REQUIRE(parse_rational("3/4") == rational(3, 4));
  REQUIRE(parse_rational("-2") == rational(-2));
  REQUIRE(parse_rational("0.25") == rational(1, 4));
  REQUIRE(parse_rational("-1.5") == rational(-3, 2));
  REQUIRE(to_string(rational(6, 8)) == "3/4");
  REQUIRE(to_string(rational(-5)) == "-5");
  REQUIRE_THROWS_AS(parse_rational("1/0"), config_error);
  REQUIRE_THROWS_AS(parse_rational("a"), config_error);
  REQUIRE_THROWS_AS(parse_rational(""), config_error);
  REQUIRE(rational_ceil(rational(7, 2)) == 4);
  REQUIRE(rational_ceil(rational(-7, 2)) == -3);
  REQUIRE(rational_ceil(rational(4)) == 4);
  REQUIRE(rational_pow(rational(2, 3), 3) == rational(8, 27));
  REQUIRE(rational_pow(rational(2, 3), -2) == rational(9, 4));
  REQUIRE(rational_pow(rational(5), 0) == rational(1));
}

TEST_CASE("parallel_for covers every slot once and propagates exceptions") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  REQUIRE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  REQUIRE_THROWS_AS(parallel_for(8, 3,
                                 [](std::size_t i) {
                                   if (i == 5) throw config_error("boom");
                                 }),
                    config_error);
}

TEST_CASE("num_io round-trips per lane") {
  REQUIRE(num_io<rational>::to_json(rational(-3, 7)) == "-3/7");
  REQUIRE(num_io<rational>::from_json(nlohmann::json("5/2")) == rational(5, 2));
  REQUIRE_THROWS_AS(num_io<rational>::from_json(nlohmann::json(2.5)), config_error);
  REQUIRE(num_io<double>::from_json(nlohmann::json(0.125)) == 0.125);
  REQUIRE_THROWS_AS(num_io<double>::from_json(nlohmann::json("x")), config_error);
  REQUIRE(num_io<double>::parse("1e-3") == 1e-3);
  REQUIRE_THROWS_AS(num_io<double>::parse("1x"), config_error);
  REQUIRE_THROWS_AS(num_io<double>::parse("nan(2)x"), config_error);
  REQUIRE(num_from_rational<double>(rational(1, 2)) == 0.5);
  REQUIRE(num_from_rational<rational>(rational(1, 3)) == rational(1, 3));
}
