#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "ol2r/dataset.hpp"
#include "ol2r/errors.hpp"
#include "oracles.hpp"

using namespace ol2r;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const auto path =
      (std::filesystem::temp_directory_path() / name).string();
  std::ofstream out(path, std::ios::trunc);
  out << content;
  return path;
}

}  // namespace

TEST_SUITE_BEGIN("dataset");

TEST_CASE("letor line maps labels and sparse features") {
  const auto path = write_temp("ol2r_basic.txt", "2 qid:10 1:0.5 3:1.0\n");
  const auto split = load_letor(path, 3);
  REQUIRE(split.size() == 1);
  CHECK(split[0].query_id == "10");
  REQUIRE(split[0].documents.size() == 1);
  const auto& doc = split[0].documents[0];
  CHECK(doc.relevance == 2);
  CHECK(doc.features == std::vector<double>{0.5, 0.0, 1.0});
}

TEST_CASE("empty file loads as an empty split") {
  const auto path = write_temp("ol2r_empty.txt", "");
  CHECK(load_letor(path, 3).empty());
}

TEST_CASE("label outside the grade range is rejected with a line number") {
  const auto path = write_temp("ol2r_badlabel.txt", "7 qid:1 1:0.1\n");
  CHECK_THROWS_WITH_AS(load_letor(path, 3),
                       doctest::Contains(":1:"), DataError);
}

TEST_CASE("feature index beyond the dimension is rejected") {
  const auto path = write_temp("ol2r_baddim.txt", "1 qid:1 5:0.1\n");
  CHECK_THROWS_AS(load_letor(path, 3), DataError);
}

TEST_CASE("non-finite feature values are rejected") {
  const auto path = write_temp("ol2r_nanfeat.txt", "1 qid:1 1:nan\n");
  CHECK_THROWS_AS(load_letor(path, 3), DataError);
}

TEST_CASE("malformed tokens carry their line number") {
  const auto path =
      write_temp("ol2r_badtok.txt", "1 qid:1 1:0.1\n0 qid:1 nonsense\n");
  CHECK_THROWS_WITH_AS(load_letor(path, 3),
                       doctest::Contains(":2:"), DataError);
}

TEST_CASE("documents group by qid preserving order, comments stripped") {
  const auto path = write_temp("ol2r_groups.txt",
                               "0 qid:a 1:1.0 # first\n"
                               "1 qid:b 1:2.0\n"
                               "2 qid:a 1:3.0\n");
  const auto split = load_letor(path, 1);
  REQUIRE(split.size() == 2);
  CHECK(split[0].query_id == "a");
  REQUIRE(split[0].documents.size() == 2);
  CHECK(split[0].documents[0].features[0] == 1.0);
  CHECK(split[0].documents[1].features[0] == 3.0);
  CHECK(split[0].documents[1].doc_index == 1);
  CHECK(split[1].query_id == "b");
}

TEST_CASE("round-trip through save_letor preserves everything") {
  const auto ds = make_synthetic(5, 0, 0, 7, 4, 21);
  const auto path =
      (std::filesystem::temp_directory_path() / "ol2r_roundtrip.txt").string();
  save_letor(ds.train, path);
  const auto back = load_letor(path, 4);
  REQUIRE(back.size() == ds.train.size());
  for (std::size_t qi = 0; qi < back.size(); ++qi) {
    CHECK(back[qi].query_id == ds.train[qi].query_id);
    REQUIRE(back[qi].documents.size() == ds.train[qi].documents.size());
    for (std::size_t di = 0; di < back[qi].documents.size(); ++di) {
      CHECK(back[qi].documents[di].relevance ==
            ds.train[qi].documents[di].relevance);
      CHECK(back[qi].documents[di].features ==
            ds.train[qi].documents[di].features);
    }
  }
}

TEST_CASE("per-query min-max normalization") {
  Query q;
  q.query_id = "q";
  for (double v : {1.0, 3.0, 5.0})
    q.documents.push_back({static_cast<int>(q.documents.size()), {v, 4.0, -v}, 0});

  const Query norm = normalize_per_query(q);
  CHECK(norm.documents[0].features[0] == 0.0);
  CHECK(norm.documents[1].features[0] == 0.5);
  CHECK(norm.documents[2].features[0] == 1.0);
  // constant column collapses to zero
  CHECK(norm.documents[0].features[1] == 0.0);
  CHECK(norm.documents[2].features[1] == 0.0);
  // negative range maps onto [0, 1]
  CHECK(norm.documents[0].features[2] == 1.0);
  CHECK(norm.documents[2].features[2] == 0.0);

  SUBCASE("idempotent") {
    const Query twice = normalize_per_query(norm);
    for (std::size_t i = 0; i < twice.documents.size(); ++i)
      CHECK(twice.documents[i].features == norm.documents[i].features);
  }
}

TEST_CASE("sample_query draws uniformly") {
  std::vector<Query> split(4);
  for (int i = 0; i < 4; ++i) split[static_cast<std::size_t>(i)].query_id = std::to_string(i);

  RandomStream rng(17);
  const int n = 100000;
  std::array<int, 4> counts{};
  for (int i = 0; i < n; ++i) {
    const auto& q = sample_query(split, rng);
    ++counts[static_cast<std::size_t>(std::stoi(q.query_id))];
  }
  const double expected = n / 4.0;
  double chi2 = 0.0;
  for (int c : counts) {
    CHECK(std::fabs(c / static_cast<double>(n) - 0.25) < 0.01);
    chi2 += (c - expected) * (c - expected) / expected;
  }
  CHECK(chi2 < oracle::chi2_critical_99(3));
}

TEST_CASE("sample_query on a single query and on an empty split") {
  std::vector<Query> one(1);
  one[0].query_id = "only";
  RandomStream rng(1);
  CHECK(sample_query(one, rng).query_id == "only");
  std::vector<Query> none;
  CHECK_THROWS_AS(sample_query(none, rng), DataError);
}

TEST_CASE("sample_query consumes exactly one draw") {
  std::vector<Query> split(3);
  RandomStream a(5), b(5);
  sample_query(split, a);
  b.next_u64();
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("synthetic datasets are deterministic in the seed") {
  const auto a = make_synthetic(10, 2, 3, 5, 6, 99);
  const auto b = make_synthetic(10, 2, 3, 5, 6, 99);
  CHECK(a.synthetic.hidden_weights == b.synthetic.hidden_weights);
  for (std::size_t qi = 0; qi < a.train.size(); ++qi)
    for (std::size_t di = 0; di < a.train[qi].documents.size(); ++di) {
      CHECK(a.train[qi].documents[di].features ==
            b.train[qi].documents[di].features);
      CHECK(a.train[qi].documents[di].relevance ==
            b.train[qi].documents[di].relevance);
    }
  const auto c = make_synthetic(10, 2, 3, 5, 6, 100);
  CHECK(a.synthetic.hidden_weights != c.synthetic.hidden_weights);
}

TEST_CASE("synthetic labels spread nearly uniformly over the grades") {
  const auto ds = make_synthetic(100, 0, 0, 10, 10, 7);
  std::array<int, 5> hist{};
  int total = 0;
  for (const auto& q : ds.train)
    for (const auto& d : q.documents) {
      ++hist[static_cast<std::size_t>(d.relevance)];
      ++total;
    }
  for (int g = 0; g < 5; ++g) {
    const double frac = hist[static_cast<std::size_t>(g)] / static_cast<double>(total);
    CHECK(frac > 0.18);
    CHECK(frac < 0.22);
  }
}

TEST_CASE("synthetic metadata sidecar round-trips") {
  const auto ds = make_synthetic(4, 0, 2, 3, 5, 13);
  const auto path =
      (std::filesystem::temp_directory_path() / "ol2r_meta.json").string();
  save_synthetic_meta(ds.synthetic, path);
  const auto back = load_synthetic_meta(path);
  CHECK(back.seed == ds.synthetic.seed);
  CHECK(back.hidden_weights == ds.synthetic.hidden_weights);
  CHECK(back.grade_edges == ds.synthetic.grade_edges);
}

TEST_SUITE_END();
