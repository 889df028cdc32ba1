#include <doctest.h>

#include "dcnn/conv.hpp"
#include "dcnn/error.hpp"
#include "dcnn/rng.hpp"
#include "fd.hpp"
#include "oracles.hpp"
#include "selfcheck.hpp"

using namespace dcnn;

using Vec = std::vector<double>;

TEST_CASE("width-1 identity filter") {
  const Vec s{1, 2, 3}, m{1};
  for (auto path : {ConvPath::Direct, ConvPath::Fft}) {
    CHECK(conv1d(s, m, ConvKind::Narrow, path) == s);
    CHECK(conv1d(s, m, ConvKind::Wide, path) == s);
  }
}

TEST_CASE("hand-computed narrow and wide") {
  const Vec s{1, 2, 3}, m{1, 1};
  CHECK(conv1d(s, m, ConvKind::Narrow, ConvPath::Direct) == Vec{3, 5});
  CHECK(conv1d(s, m, ConvKind::Wide, ConvPath::Direct) == Vec{1, 3, 5, 3});
  const auto fft = conv1d(s, m, ConvKind::Wide, ConvPath::Fft);
  const Vec want{1, 3, 5, 3};
  for (std::size_t i = 0; i < 4; ++i) CHECK(fft[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("filter taps apply in forward order against each window") {
  const Vec s{1, 10, 100}, m{1, 2};
  // out_j = m0 * s[j-1] + m1 * s[j]
  CHECK(conv1d(s, m, ConvKind::Narrow, ConvPath::Direct) == Vec{21, 210});
  CHECK(conv1d(s, m, ConvKind::Wide, ConvPath::Direct) == Vec{2, 21, 210, 100});
}

TEST_CASE("output lengths and errors") {
  CHECK(conv_output_length(7, 3, ConvKind::Wide) == 9);
  CHECK(conv_output_length(7, 3, ConvKind::Narrow) == 5);
  CHECK_THROWS_AS(conv_output_length(2, 3, ConvKind::Narrow), InvalidArgument);
  for (std::size_t s = 1; s < 6; ++s) {
    for (std::size_t m = 1; m < 9; ++m) CHECK(conv_output_length(s, m, ConvKind::Wide) == s + m - 1);
  }
  CHECK_THROWS_AS(conv_rows(Mat(2, 5), Mat(3, 2), ConvKind::Wide), InvalidArgument);
}

TEST_CASE("conv_rows shape and fft agreement") {
  Rng rng(1);
  Mat in(4, 7), f(4, 3);
  rng.fill_uniform(in.values(), -1, 1);
  rng.fill_uniform(f.values(), -1, 1);
  const Mat w = conv_rows(in, f, ConvKind::Wide);
  CHECK(w.rows() == 4);
  CHECK(w.cols() == 9);

  Mat in2(6, 12), f2(6, 4);
  rng.fill_uniform(in2.values(), -1, 1);
  rng.fill_uniform(f2.values(), -1, 1);
  CHECK(max_abs_diff(conv_rows(in2, f2, ConvKind::Wide, ConvPath::Direct),
                     conv_rows(in2, f2, ConvKind::Wide, ConvPath::Fft)) < 1e-8);
}

TEST_CASE("randomised oracle comparison") {
  const auto r = selfcheck::conv_oracle(300, 77);
  INFO(r.detail);
  CHECK(r.passed);
}

TEST_CASE("auto path picks fft for wide filters and agrees with direct") {
  Rng rng(5);
  Mat in(3, kFftCrossoverWidth + 10), f(3, kFftCrossoverWidth + 2);
  rng.fill_uniform(in.values(), -1, 1);
  rng.fill_uniform(f.values(), -1, 1);
  CHECK(max_abs_diff(conv_rows(in, f, ConvKind::Wide), conv_rows(in, f, ConvKind::Wide, ConvPath::Direct)) < 1e-9);
}

TEST_CASE("conv_rows_grad") {
  Rng rng(2);
  SUBCASE("zero upstream gives zero gradients") {
    Mat in(2, 5), f(2, 3);
    rng.fill_uniform(in.values(), -1, 1);
    rng.fill_uniform(f.values(), -1, 1);
    const ConvGrads g = conv_rows_grad(in, f, ConvKind::Wide, Mat(2, 7));
    CHECK(g.input == Mat(2, 5));
    CHECK(g.filter == Mat(2, 3));
  }
  SUBCASE("matches finite differences") {
    for (ConvKind kind : {ConvKind::Wide, ConvKind::Narrow}) {
      Mat in(2, 5), f(2, 3);
      rng.fill_uniform(in.values(), -1, 1);
      rng.fill_uniform(f.values(), -1, 1);
      Mat up(2, conv_output_length(5, 3, kind));
      rng.fill_uniform(up.values(), -1, 1);
      auto objective = [&] {
        const Mat out = conv_rows(in, f, kind, ConvPath::Direct);
        double acc = 0;
        for (std::size_t i = 0; i < out.size(); ++i) acc += out.values()[i] * up.values()[i];
        return acc;
      };
      const ConvGrads g = conv_rows_grad(in, f, kind, up);
      CHECK(fd::max_rel_error(g.input.values(), fd::gradient(in.values(), objective)) < 1e-6);
      CHECK(fd::max_rel_error(g.filter.values(), fd::gradient(f.values(), objective)) < 1e-6);
    }
  }
  SUBCASE("shape mismatch") {
    CHECK_THROWS_AS(conv_rows_grad(Mat(2, 5), Mat(2, 3), ConvKind::Wide, Mat(2, 6)), InvalidArgument);
  }
}
