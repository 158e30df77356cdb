#include "doctest.h"
#include "lawn/channel.hpp"
#include "lawn/errors.hpp"
#include "support.hpp"

#include <cmath>
#include <stdexcept>

using namespace lawn;

// Oracle values evaluated independently (Python, double precision) from
// 20 log10(4 pi d f / c) with c = 299792458.
TEST_CASE("fspl reference values") {
  CHECK(fspl_db(1.0, 2.6e9) == doctest::Approx(40.747250181299734).epsilon(1e-12));
  CHECK(fspl_db(1000.0, 2.6e9) == doctest::Approx(100.74725018129973).epsilon(1e-12));
  CHECK(fspl_db(500.0, 2.6e9) == doctest::Approx(94.72665026802011).epsilon(1e-12));
  CHECK(fspl_db(100.0, 2.6e9) == doctest::Approx(80.74725018129973).epsilon(1e-12));
}

TEST_CASE("fspl doubling and monotonicity") {
  for (double d : {0.5, 1.0, 37.0, 1000.0})
    CHECK(std::abs(fspl_db(2 * d, 2.6e9) - fspl_db(d, 2.6e9) - 20 * std::log10(2.0)) < 1e-9);
  double prev = fspl_db(1.0, 2.6e9);
  for (double d = 2.0; d < 3000.0; d *= 1.7) {
    CHECK(fspl_db(d, 2.6e9) > prev);
    prev = fspl_db(d, 2.6e9);
  }
  CHECK(fspl_db(10.0, 5e9) > fspl_db(10.0, 2.6e9));
  CHECK_THROWS_AS(fspl_db(0.0, 2.6e9), std::domain_error);
  CHECK_THROWS_AS(fspl_db(1.0, 0.0), std::domain_error);
}

TEST_CASE("link gain") {
  ChannelParams p;
  const Position3 a{0, 0, 0}, b{500, 0, 0};
  CHECK(link_gain(a, b, p, true).gain_db == doctest::Approx(-88.70605035474048).epsilon(1e-12));
  CHECK(link_gain(a, b, p, false).gain_db == doctest::Approx(-fspl_db(500.0, 2.6e9)));
  CHECK(link_gain(a, b, p, true).gain_db - link_gain(a, b, p, false).gain_db ==
        doctest::Approx(10 * std::log10(4.0)));
  CHECK(link_gain(a, b, p, true).distance_m == 500.0);
  CHECK_THROWS_AS(link_gain(a, a, p, true), std::domain_error);
}

TEST_CASE("rss") {
  CHECK(rss_dbm(30.0, {-88.706, 0}) == doctest::Approx(-58.706));
  CHECK(rss_dbm(0.0, {0.0, 0}) == 0.0);
  CHECK(rss_dbm(30.0, {-130.0, 0}) == doctest::Approx(-100.0));
  for (double pw : {-10.0, 0.0, 17.5, 43.0})
    CHECK(rss_dbm(pw, {-71.0, 0}) - rss_dbm(0.0, {-71.0, 0}) == doctest::Approx(pw));
}

TEST_CASE("echo gain") {
  ChannelParams p;
  CHECK(echo_gain_db(Position3{-100, 0, 0}, Position3{0, 0, 0}, Position3{100, 0, 0}, p) ==
        doctest::Approx(-159.45330053604022).epsilon(1e-12));
  ChannelParams bare = p;
  bare.reflection_loss_db = 0.0;
  bare.mainlobe_gain_linear = 1.0;
  CHECK(echo_gain_db(Position3{-1, 0, 0}, Position3{0, 0, 0}, Position3{1, 0, 0}, bare) ==
        doctest::Approx(-81.49450036259947).epsilon(1e-12));
  const double g1 = echo_gain_db(Position3{-30, 0, 0}, Position3{0, 0, 0}, Position3{0, 70, 0}, p);
  const double g2 = echo_gain_db(Position3{-60, 0, 0}, Position3{0, 0, 0}, Position3{0, 140, 0}, p);
  CHECK(g1 - g2 == doctest::Approx(2 * 20 * std::log10(2.0)));
  // Never better than either hop alone.
  CHECK(g1 <= link_gain(Position3{-30, 0, 0}, Position3{0, 0, 0}, p, true).gain_db);
}

TEST_CASE("unit conversions and validation") {
  CHECK(dbm_to_watts(30.0) == doctest::Approx(1.0));
  CHECK(db_to_linear(linear_to_db(123.0)) == doctest::Approx(123.0));
  ChannelParams p;
  CHECK(p.noise_w() == doctest::Approx(std::pow(10.0, -12.4)));
  p.wpt_efficiency = 1.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
