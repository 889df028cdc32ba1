#include <doctest.h>

#include "dcnn/error.hpp"
#include "dcnn/pooling.hpp"
#include "dcnn/rng.hpp"
#include "fd.hpp"
#include "oracles.hpp"
#include "selfcheck.hpp"

using namespace dcnn;

using Vec = std::vector<double>;
using Idx = std::vector<std::size_t>;

TEST_CASE("kmax examples") {
  auto r = kmax(Vec{3, 1, 5, 2}, 2);
  CHECK(r.pooled == Vec{3, 5});
  CHECK(r.selected == Idx{0, 2});

  const Vec p{4, -1, 2, 8, 0};
  r = kmax(p, p.size());
  CHECK(r.pooled == p);
  CHECK(r.selected == Idx{0, 1, 2, 3, 4});

  r = kmax(Vec{7, 7, 7, 1}, 2);
  CHECK(r.pooled == Vec{7, 7});
  CHECK(r.selected == Idx{0, 1});

  CHECK_THROWS_AS(kmax(Vec{1, 2}, 0), InvalidArgument);
}

TEST_CASE("kmax with fewer values than k pads with zeros") {
  const auto r = kmax(Vec{2, -3}, 4);
  CHECK(r.pooled == Vec{2, -3, 0, 0});
  CHECK(r.selected == Idx{0, 1});
}

TEST_CASE("kmax oracle and idempotence") {
  const auto r = selfcheck::kmax_oracle(3000, 31);
  INFO(r.detail);
  CHECK(r.passed);
}

TEST_CASE("dynamic k") {
  CHECK(dynamic_k({3, 3}, 1, 18) == 12);
  CHECK(dynamic_k({3, 3}, 2, 18) == 6);
  CHECK(dynamic_k({3, 3}, 3, 18) == 3);
  CHECK(dynamic_k({2, 4}, 1, 7) == 4);
  CHECK(dynamic_k({2, 4}, 2, 100) == 4);
  CHECK_THROWS_AS(dynamic_k({2, 4}, 0, 7), InvalidArgument);
  CHECK_THROWS_AS(dynamic_k({2, 4}, 3, 7), InvalidArgument);
  const auto r = selfcheck::dynamic_k_properties();
  INFO(r.detail);
  CHECK(r.passed);
}

TEST_CASE("max over time") {
  CHECK(max_over_time(Mat::from_rows({{1, 9, 3}, {4, 4, 4}})) == Vec{9, 4});
  CHECK(max_over_time(Mat::from_rows({{2}, {-5}})) == Vec{2, -5});
  CHECK(argmax_over_time(Mat::from_rows({{1, 9, 9}, {4, 4, 4}})) == Idx{1, 0});
  CHECK_THROWS_AS(max_over_time(Mat(2, 0)), InvalidArgument);
}

TEST_CASE("fold") {
  CHECK(fold(Mat::from_rows({{1, 2}, {3, 4}})) == Mat::from_rows({{4, 6}}));
  CHECK(fold(Mat(4, 5)) == Mat(2, 5));
  CHECK_THROWS_AS(fold(Mat(3, 2)), InvalidArgument);
  const Mat g = fold_grad(Mat::from_rows({{1, 2}}));
  CHECK(g == Mat::from_rows({{1, 2}, {1, 2}}));
}

TEST_CASE("kmax_grad") {
  Rng rng(9);
  SUBCASE("zero upstream") {
    Mat m(3, 6);
    rng.fill_uniform(m.values(), -1, 1);
    PoolSelection sel;
    kmax_rows(m, 2, sel);
    CHECK(kmax_grad(sel, Mat(3, 2)) == Mat(3, 6));
  }
  SUBCASE("identity pooling passes the gradient through") {
    Mat m(3, 6), up(3, 6);
    rng.fill_uniform(m.values(), -1, 1);
    rng.fill_uniform(up.values(), -1, 1);
    PoolSelection sel;
    CHECK(kmax_rows(m, 6, sel) == m);
    CHECK(kmax_grad(sel, up) == up);
  }
  SUBCASE("matches finite differences") {
    Mat m(3, 6), up(3, 2);
    rng.fill_uniform(m.values(), -1, 1);
    rng.fill_uniform(up.values(), -1, 1);
    PoolSelection sel;
    kmax_rows(m, 2, sel);
    auto objective = [&] {
      PoolSelection s;
      const Mat p = kmax_rows(m, 2, s);
      double acc = 0;
      for (std::size_t i = 0; i < p.size(); ++i) acc += p.values()[i] * up.values()[i];
      return acc;
    };
    const Mat g = kmax_grad(sel, up);
    CHECK(fd::max_rel_error(g.values(), fd::gradient(m.values(), objective)) < 1e-6);
  }
  SUBCASE("padded slots route nothing") {
    PoolSelection sel;
    kmax_rows(Mat::from_rows({{1, 2}}), 4, sel);
    CHECK(kmax_grad(sel, Mat::from_rows({{5, 6, 7, 8}})) == Mat::from_rows({{5, 6}}));
  }
  SUBCASE("shape mismatch") {
    PoolSelection sel;
    kmax_rows(Mat(3, 6), 2, sel);
    CHECK_THROWS_AS(kmax_grad(sel, Mat(3, 3)), InvalidArgument);
  }
}
