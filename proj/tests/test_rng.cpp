#include <doctest.h>

#include <cmath>

#include "ol2r/rng.hpp"

using namespace ol2r;

TEST_SUITE_BEGIN("rng");

TEST_CASE("seeded stream replays identically") {
  RandomStream a(42), b(42);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("serialize round-trips mid-sequence") {
  RandomStream a(7);
  for (int i = 0; i < 123; ++i) a.uniform01();
  RandomStream b;
  b.deserialize(a.serialize());
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("normal draws have the requested moments") {
  RandomStream rng(3);
  const int n = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal(0.0, 2.0);
    sum += x;
    sumsq += x * x;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::fabs(mean) < 0.05);
  CHECK(std::fabs(var - 4.0) < 0.1);
}

TEST_CASE("normal consumes exactly two draws") {
  RandomStream a(9), b(9);
  a.normal();
  b.next_u64();
  b.next_u64();
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derived streams never alias across names or indices") {
  const auto s1 = derive_seed(1, "clicks");
  const auto s2 = derive_seed(1, "query_sampling");
  const auto s3 = derive_seed(1, "perturbation", 0);
  const auto s4 = derive_seed(1, "perturbation", 1);
  CHECK(s1 != s2);
  CHECK(s3 != s4);
  CHECK(s1 != s3);
}

TEST_CASE("consuming one member stream leaves the others untouched") {
  RngStreams a(5, 3), b(5, 3);
  for (int i = 0; i < 50; ++i) a.perturbation(2).next_u64();
  CHECK(a.perturbation(0).next_u64() == b.perturbation(0).next_u64());
  CHECK(a.clicks().next_u64() == b.clicks().next_u64());
}

TEST_CASE("member seed overrides pin individual noise streams") {
  RngStreams a(5, 2, {11, 12}), b(5, 2, {11, 99});
  CHECK(a.perturbation(0).next_u64() == b.perturbation(0).next_u64());
  CHECK(a.perturbation(1).next_u64() != b.perturbation(1).next_u64());
}

TEST_CASE("streams serialize as a bundle") {
  RngStreams a(123, 2);
  a.clicks().normal();
  a.perturbation(1).uniform01();
  RngStreams b;
  b.deserialize(a.serialize());
  CHECK(a.clicks().next_u64() == b.clicks().next_u64());
  CHECK(a.perturbation(1).next_u64() == b.perturbation(1).next_u64());
  CHECK(a.query_sampling().next_u64() == b.query_sampling().next_u64());
}

TEST_SUITE_END();
