#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sheafkit/towers.hpp"
#include "support.hpp"

using namespace sheafkit;

TEST_CASE("constant tower") {
  const Tower t = Tower::constant(1, 2);
  const InverseLimit lim = inverse_limit(t);
  CHECK(lim.group == FgAbGroup::free(1));
  for (const auto& p : lim.projections) CHECK(p == IntMatrix::identity(1));
  CHECK(mittag_leffler(t));
  CHECK(lim1_status(t) == Lim1Status::Zero);
}

TEST_CASE("tower with a doubling map") {
  Tower t;
  t.ranks = {1, 1};
  t.maps = {IntMatrix{{2}}};
  const InverseLimit lim = inverse_limit(t);
  CHECK(lim.group == FgAbGroup::free(1));
  CHECK(lim.projections[0] == IntMatrix{{2}});
  CHECK(lim.projections[1] == IntMatrix{{1}});
}

TEST_CASE("tower with a projection") {
  Tower t;
  t.ranks = {1, 2};
  t.maps = {IntMatrix{{1, 0}}};
  const InverseLimit lim = inverse_limit(t);
  CHECK(lim.group == FgAbGroup::free(2));
  CHECK(lim.projections[0] == IntMatrix{{1, 0}});
}

TEST_CASE("iterated self-maps") {
  const Tower doubling = Tower::self_map(IntMatrix{{2}});
  CHECK_FALSE(mittag_leffler(doubling));
  CHECK(lim1_status(doubling) == Lim1Status::NonzeroUncountable);
  CHECK(std::string(to_string(lim1_status(doubling))) == "nonzero (uncountable)");
  CHECK_THROWS_AS(inverse_limit(doubling), UnsupportedError);

  const Tower id = Tower::self_map(IntMatrix::identity(2));
  CHECK(mittag_leffler(id));
  CHECK(inverse_limit(id).group == FgAbGroup::free(2));

  // a nilpotent part dies, a unimodular part survives
  const Tower mixed = Tower::self_map(IntMatrix{{0, 0}, {0, -1}});
  CHECK(mittag_leffler(mixed));
  CHECK(inverse_limit(mixed).group == FgAbGroup::free(1));

  // the image chain of [[1,1],[0,2]] keeps shrinking by index 2
  const Tower shear = Tower::self_map(IntMatrix{{1, 1}, {0, 2}});
  CHECK_FALSE(mittag_leffler(shear));
}

TEST_CASE("self-map limits are compatible sequences") {
  const IntMatrix f{{0, 1, 0}, {1, 0, 0}, {0, 0, 0}};
  const InverseLimit lim = inverse_limit(Tower::self_map(f));
  REQUIRE(lim.projections.size() >= 2);
  CHECK(lim.group == FgAbGroup::free(2));
  for (std::size_t k = 1; k < lim.projections.size(); ++k)
    CHECK(f * lim.projections[k] == lim.projections[k - 1]);
}

TEST_CASE("skyscraper sequence check") {
  CHECK(skyscraper_ses_check(Tower::constant(1, 3), FgAbGroup::free(1)));
  CHECK_FALSE(skyscraper_ses_check(Tower::constant(1, 3), FgAbGroup::free(2)));
  CHECK_THROWS_AS(skyscraper_ses_check(Tower::self_map(IntMatrix{{3}}), FgAbGroup::free(0)), UnsupportedError);
}

TEST_CASE("skyscraper sequence on a tower built from windows") {
  const ElementaryAlgebra b = testing::simple("B", 1, 3);
  const SkyscraperTowers towers = skyscraper_towers(1, SkyscraperLocation::singular(1), b);
  CHECK(skyscraper_ses_check(towers.e1, skyscraper_e(1, SkyscraperLocation::singular(1), b).e1));
}

TEST_CASE("shape validation") {
  Tower t;
  t.ranks = {1, 2};
  t.maps = {IntMatrix{{1}}};
  CHECK_THROWS_AS(validate(t), ShapeError);
  Tower empty;
  CHECK_THROWS_AS(validate(empty), ShapeError);
}

TEST_CASE("property: limits of finite towers are the last stage") {
  testing::Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    Tower t;
    const auto len = static_cast<std::size_t>(testing::uniform(rng, 0, 3));
    for (std::size_t k = 0; k <= len; ++k) t.ranks.push_back(static_cast<std::size_t>(testing::uniform(rng, 0, 3)));
    for (std::size_t k = 1; k <= len; ++k)
      t.maps.push_back(testing::random_matrix(rng, t.ranks[k - 1], t.ranks[k], -3, 3));
    const InverseLimit lim = inverse_limit(t);
    CHECK(lim.group == FgAbGroup::free(t.ranks.back()));
    for (std::size_t k = 1; k <= len; ++k) CHECK(t.maps[k - 1] * lim.projections[k] == lim.projections[k - 1]);
  }
}
