#include <doctest.h>

#include <algorithm>
#include <set>

#include "blindmimo/signal.hpp"

using namespace blindmimo;

TEST_CASE("QPSK alphabet") {
  const auto c = build_constellation(ConstellationKind::kQpsk);
  REQUIRE(c.size() == 4);
  cplx sum = 0;
  for (const auto& p : c.points) {
    CHECK(std::abs(std::abs(p) - 1.0) < 1e-12);
    sum += p;
  }
  CHECK(std::abs(sum) < 1e-12);
  CHECK(c.peak_magnitude() == doctest::Approx(1.0));
  CHECK(std::abs(c.points[0] - cplx(1, 1) / std::sqrt(2.0)) < 1e-15);
  // Gray: neighbours along either axis differ in one bit
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      const double d = std::abs(c.points[a] - c.points[b]);
      if (std::abs(d - std::sqrt(2.0)) < 1e-9) CHECK(__builtin_popcount(a ^ b) == 1);
    }
}

TEST_CASE("QAM16 alphabet") {
  const auto c = build_constellation(ConstellationKind::kQam16);
  REQUIRE(c.size() == 16);
  double power = 0;
  cplx sum = 0;
  for (const auto& p : c.points) {
    power += std::norm(p);
    sum += p;
  }
  CHECK(power / 16 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(sum) < 1e-12);
  std::set<std::pair<long, long>> distinct;
  for (const auto& p : c.points) distinct.insert({std::lround(p.real() * 1e6), std::lround(p.imag() * 1e6)});
  CHECK(distinct.size() == 16);
  const double dmin = 2.0 / std::sqrt(10.0);
  for (int a = 0; a < 16; ++a)
    for (int b = 0; b < 16; ++b)
      if (std::abs(std::abs(c.points[a] - c.points[b]) - dmin) < 1e-9) CHECK(__builtin_popcount(a ^ b) == 1);
}

TEST_CASE("constellation tags") {
  CHECK(parse_constellation("QPSK") == ConstellationKind::kQpsk);
  CHECK(parse_constellation(to_string(ConstellationKind::kQam16)) == ConstellationKind::kQam16);
  CHECK_THROWS_AS(parse_constellation("8PSK"), ParameterError);
}

TEST_CASE("header_length") {
  CHECK(header_length(8, 4) == 2);
  CHECK(header_length(4, 4) == 1);
  CHECK(header_length(5, 4) == 2);
  CHECK(header_length(1, 4) == 0);
  CHECK(header_length(17, 16) == 2);
  CHECK(header_length(30, 4) == 3);
}

TEST_CASE("build_frame layout") {
  const auto c = build_constellation(ConstellationKind::kQpsk);
  Rng rng(1);
  const auto f = build_frame(8, 20, c, rng);
  const double s = 1.0 / std::sqrt(20.0);
  CHECK(f.layout.header_len == 2);
  CHECK(f.layout.payload_begin() == 3);
  for (int k = 0; k < 8; ++k) CHECK(std::abs(f.x(k, 0) - f.layout.ref_value * s) < 1e-15);
  std::set<std::pair<int, int>> ids;
  for (int k = 0; k < 8; ++k) {
    ids.insert({f.labels(k, 1), f.labels(k, 2)});
    // big-endian base-4 digits of k
    CHECK(f.labels(k, 1) == k / 4);
    CHECK(f.labels(k, 2) == k % 4);
    CHECK(std::abs(f.layout.id_codebook(k, 0) * s - f.x(k, 1)) < 1e-15);
  }
  CHECK(ids.size() == 8);
  CHECK(f.x.cwiseAbs().maxCoeff() == doctest::Approx(c.peak_magnitude() * s));
  CHECK(f.payload_bits(c).size() == 8u * 17u * 2u);
  CHECK_THROWS_AS(build_frame(8, 3, c, rng), ParameterError);
}

TEST_CASE("build_frame determinism and power") {
  const auto c = build_constellation(ConstellationKind::kQam16);
  Rng a(5), b(5);
  const auto f1 = build_frame(6, 150, c, a);
  const auto f2 = build_frame(6, 150, c, b);
  CHECK((f1.x - f2.x).norm() == 0.0);
  CHECK(f1.x.squaredNorm() >= 6 * 0.9);
  CHECK(f1.x.squaredNorm() <= 6 * 1.1);
}

TEST_CASE("synthesize_received noiseless single user") {
  Rng rng(2);
  CMatrix h = CMatrix::Zero(5, 1);
  h(0, 0) = 1.0;
  const ChannelRealization ch(h, ChannelModel::kBernoulliGaussian);
  const CMatrix x = rng.complex_normal_matrix(1, 7);
  const auto rx = synthesize_received(ch, x, RVector::Ones(1), RVector::Ones(1), 0.0, rng);
  CHECK((rx.y_bar.row(0) - x.row(0)).norm() == 0.0);
  CHECK(rx.y_bar.bottomRows(4).norm() == 0.0);
  CHECK_THROWS_AS(synthesize_received(ch, x, RVector::Ones(1), RVector::Ones(1), -1.0, rng), ParameterError);
  CHECK_THROWS_AS(synthesize_received(ch, x, RVector::Ones(2), RVector::Ones(1), 0.0, rng), DimensionError);
}

TEST_CASE("synthesize_received applies G and P") {
  Rng rng(3);
  const ChannelRealization ch(CMatrix::Identity(2, 2), ChannelModel::kBernoulliGaussian);
  const CMatrix x = CMatrix::Ones(2, 3);
  RVector g(2), p(2);
  g << 4, 1;
  p << 1, 9;
  const auto rx = synthesize_received(ch, x, g, p, 0.0, rng);
  CHECK(std::abs(rx.y_bar(0, 0) - 2.0) < 1e-15);
  CHECK(std::abs(rx.y_bar(1, 2) - 3.0) < 1e-15);
}

TEST_CASE("synthesize_received noise moments") {
  Rng rng(4);
  const ChannelRealization ch(CMatrix::Zero(1000, 1), ChannelModel::kBernoulliGaussian);
  const double s2 = 0.37;
  const auto rx = synthesize_received(ch, CMatrix::Zero(1, 1000), RVector::Ones(1), RVector::Ones(1), s2, rng);
  const double n = 1e6;
  const double var = rx.y_bar.squaredNorm() / n;
  double m4 = 0;
  for (Eigen::Index i = 0; i < rx.y_bar.size(); ++i) m4 += std::pow(std::norm(rx.y_bar(i)), 2);
  CHECK(std::abs(var - s2) < 3 * std::sqrt((m4 / n - var * var) / n));
  CHECK(std::abs(rx.y_bar.real().squaredNorm() / n - s2 / 2) < 0.01 * s2);
}

TEST_CASE("concentration_statistic") {
  Rng rng(5);
  CMatrix x(1, 2);
  x << 1, 1;
  x /= std::sqrt(2.0);
  CHECK(concentration_statistic(x) < 1e-15);
  CMatrix q = CMatrix::Identity(3, 5);
  CHECK(concentration_statistic(q) == 0.0);
  CMatrix z = CMatrix::Zero(4, 6);
  CHECK(concentration_statistic(z) == doctest::Approx(1.0));
}

TEST_CASE("concentration_statistic shrinks with frame length") {
  const auto c = build_constellation(ConstellationKind::kQpsk);
  Rng rng(6);
  auto median_at = [&](int t) {
    std::vector<double> v;
    for (int i = 0; i < 200; ++i) v.push_back(concentration_statistic(build_frame(8, t, c, rng).x));
    std::nth_element(v.begin(), v.begin() + 100, v.end());
    return v[100];
  };
  CHECK(median_at(800) < median_at(100));
}

TEST_CASE("header frames exceed the threshold less often as T grows") {
  const auto c = build_constellation(ConstellationKind::kQpsk);
  Rng rng(7);
  auto freq = [&](int t) {
    int hits = 0;
    for (int i = 0; i < 1000; ++i) {
      const double s = concentration_statistic(build_frame(8, t, c, rng).x);
      hits += s > std::sqrt(0.1);
    }
    return hits / 1000.0;
  };
  const double f60 = freq(60), f100 = freq(100), f500 = freq(500);
  CHECK(f60 >= f100);
  CHECK(f100 >= f500);
  CHECK(f500 == 0.0);
}
