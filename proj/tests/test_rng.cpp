#include "doctest.h"
#include "lawn/rng.hpp"

#include <cmath>
#include <vector>

using namespace lawn;

TEST_CASE("splitmix64 reference values") {
  // Seed 1234567, from an independent SplitMix64 implementation.
  Rng r(1234567);
  CHECK(r.next() == 6457827717110365317ULL);
  CHECK(r.next() == 3203168211198807973ULL);
  CHECK(r.next() == 9817491932198370423ULL);
}

TEST_CASE("same seed, same stream") {
  Rng a = Rng::stream(42, 7), b = Rng::stream(42, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  Rng c = Rng::stream(42, 8);
  Rng d = Rng::stream(42, 7);
  CHECK(c.next() != d.next());
}

TEST_CASE("uniform01 range and moments") {
  Rng r(9);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform01();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(sum / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("index stays below n") {
  Rng r(3);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) ++hist[r.index(7)];
  for (int h : hist) CHECK(h == doctest::Approx(10000).epsilon(0.05));
}

TEST_CASE("normal moments") {
  Rng r(11);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal(2.0, 3.0);
    REQUIRE(std::isfinite(x));
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  CHECK(mean == doctest::Approx(2.0).epsilon(0.02));
  CHECK(std::sqrt(s2 / n - mean * mean) == doctest::Approx(3.0).epsilon(0.02));
}
