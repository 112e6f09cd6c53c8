#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <boost/math/distributions/chi_squared.hpp>

#include "doctest.h"
#include "forest/error.hpp"
#include "forest/mdc.hpp"
#include "support.hpp"

using namespace forest;

namespace {

SampleStats brute_stats(const PixelRows& x) {
  const auto n = static_cast<double>(x.rows());
  SampleStats s;
  s.n = static_cast<std::size_t>(x.rows());
  for (int c = 0; c < 3; ++c) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) sum += x(i, c);
    s.mean(c) = sum / n;
  }
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) {
      double sum = 0.0;
      for (Eigen::Index i = 0; i < x.rows(); ++i) sum += (x(i, a) - s.mean(a)) * (x(i, b) - s.mean(b));
      s.cov(a, b) = sum / n;
    }
  }
  return s;
}

SampleStats diag_stats(std::size_t n, Eigen::Vector3d mean, Eigen::Vector3d var) {
  SampleStats s;
  s.n = n;
  s.mean = mean;
  s.cov = var.asDiagonal();
  return s;
}

PixelRows gaussian_rows(Eigen::Index n, std::mt19937_64& rng, const Eigen::Vector3d& mu,
                        double sd) {
  std::normal_distribution<double> g(0.0, sd);
  PixelRows x(n, 3);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int c = 0; c < 3; ++c) x(i, c) = mu(c) + g(rng);
  return x;
}

MdcModel model_of(std::vector<SampleStats> refs, double threshold) {
  MdcModel m;
  for (std::size_t i = 0; i < refs.size(); ++i) m.references.push_back({"r" + std::to_string(i), refs[i]});
  m.threshold = threshold;
  return m;
}

}  // namespace

TEST_CASE("sample_stats of a constant matrix has zero covariance") {
  const PixelRows x = PixelRows::Constant(20, 3, 0.4);
  const SampleStats s = sample_stats(x);
  CHECK(s.n == 20);
  CHECK(s.cov.isZero(0.0));
  CHECK(s.mean.isApprox(Eigen::Vector3d::Constant(0.4)));
}

TEST_CASE("sample_stats uses divisor n") {
  PixelRows x(2, 3);
  x << 0, 0, 0, 1, 1, 1;
  const SampleStats s = sample_stats(x);
  CHECK(s.mean == Eigen::Vector3d::Constant(0.5));
  CHECK(s.cov == Eigen::Matrix3d::Constant(0.25));
}

TEST_CASE("sample_stats agrees with a double loop") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const PixelRows x = testing::uniform_rows(3 + trial * 17, rng);
    const SampleStats s = sample_stats(x), b = brute_stats(x);
    CHECK((s.mean - b.mean).norm() <= 1e-12 * b.mean.norm());
    CHECK((s.cov - b.cov).norm() <= 1e-12 * b.cov.norm());
    CHECK((s.cov - s.cov.transpose()).norm() == 0.0);
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(s.cov).eigenvalues().minCoeff() >= -1e-12);
  }
}

TEST_CASE("sample_stats needs two pixels") {
  CHECK_THROWS_AS(sample_stats(PixelRows::Constant(1, 3, 0.2)), InvalidArgument);
}

TEST_CASE("pooled covariance") {
  SUBCASE("equal inputs scale by 2m / (2m - 2)") {
    Eigen::Matrix3d sigma;
    sigma << 2, 0.5, 0.1, 0.5, 1, 0.2, 0.1, 0.2, 3;
    SampleStats s{7, Eigen::Vector3d::Zero(), sigma};
    CHECK(pooled_covariance(s, s).isApprox(14.0 / 12.0 * sigma, 1e-15));
  }
  SUBCASE("zero inputs") {
    const SampleStats z{4, Eigen::Vector3d::Zero(), Eigen::Matrix3d::Zero()};
    CHECK(pooled_covariance(z, z).isZero(0.0));
  }
  SUBCASE("hand arithmetic, n1 = 3, n2 = 5") {
    const auto p = pooled_covariance(diag_stats(3, {0, 0, 0}, {1, 2, 3}),
                                     diag_stats(5, {0, 0, 0}, {4, 5, 6}));
    CHECK(p(0, 0) == doctest::Approx(23.0 / 6.0));
    CHECK(p(1, 1) == doctest::Approx(31.0 / 6.0));
    CHECK(p(2, 2) == doctest::Approx(39.0 / 6.0));
    CHECK(p(0, 1) == 0.0);
  }
  SUBCASE("needs more than two pixels in total") {
    const SampleStats one{1, Eigen::Vector3d::Zero(), Eigen::Matrix3d::Identity()};
    CHECK_THROWS_AS(pooled_covariance(one, one), InvalidArgument);
  }
}

TEST_CASE("identical means give T = 0") {
  const auto a = diag_stats(50, {0.2, 0.3, 0.4}, {0.01, 0.02, 0.03});
  const auto b = diag_stats(80, {0.2, 0.3, 0.4}, {0.05, 0.01, 0.02});
  CHECK(t_statistic(a, b) == 0.0);
}

TEST_CASE("one active channel reduces to the pooled two-sample t squared") {
  // Channel 0 carries the data {1,2,3,6} / 10 and {4,5,9} / 10. The other
  // channels have equal means and centred values orthogonal to channel 0,
  // so the pooled covariance is block diagonal.
  PixelRows a(4, 3), b(3, 3);
  const double e = 0.01;
  a << 0.1, 0.5 + e * 1, 0.5 + e * 4,
       0.2, 0.5 + e * 1, 0.5 - e * 5,
       0.3, 0.5 - e * 3, 0.5,
       0.6, 0.5 + e * 1, 0.5 + e * 1;
  b << 0.4, 0.5 + e * 4, 0.5,
       0.5, 0.5 - e * 5, 0.5,
       0.9, 0.5 + e * 1, 0.5;
  const SampleStats sa = sample_stats(a), sb = sample_stats(b);
  const Eigen::Matrix3d pooled = pooled_covariance(sa, sb);
  CHECK(std::abs(pooled(0, 1)) < 1e-15);
  CHECK(std::abs(pooled(0, 2)) < 1e-15);
  // t^2 = (3 - 6)^2 / (5.6 (1/4 + 1/3)) = 135 / 49 on the unscaled data.
  CHECK(t_statistic(sa, sb, 0.0) == doctest::Approx(135.0 / 49.0).epsilon(1e-12));
}

TEST_CASE("T is symmetric") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const auto a = sample_stats(testing::uniform_rows(30, rng, 0.0, 0.5));
    const auto b = sample_stats(testing::uniform_rows(45, rng, 0.1, 0.6));
    CHECK(t_statistic(a, b) == doctest::Approx(t_statistic(b, a)).epsilon(1e-13));
    CHECK(t_statistic(a, b) >= 0.0);
  }
}

TEST_CASE("T is invariant under a common invertible affine map when ridge = 0") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    const PixelRows x = testing::uniform_rows(40, rng);
    const PixelRows y = testing::uniform_rows(60, rng, 0.1, 0.9);
    Eigen::Matrix3d m;
    for (int i = 0; i < 9; ++i) m.data()[i] = g(rng);
    if (std::abs(m.determinant()) < 0.1) continue;
    const Eigen::RowVector3d shift(g(rng), g(rng), g(rng));
    const PixelRows mx = (x * m.transpose()).rowwise() + shift;
    const PixelRows my = (y * m.transpose()).rowwise() + shift;
    const double before = t_statistic(sample_stats(x), sample_stats(y), 0.0);
    const double after = t_statistic(sample_stats(mx), sample_stats(my), 0.0);
    CHECK(after == doctest::Approx(before).epsilon(1e-8));
  }
}

TEST_CASE("T under the null averages 3 and follows chi^2(3)") {
  std::mt19937_64 rng(14);
  const Eigen::Vector3d mu(0.3, 0.4, 0.5);
  const double sd = 0.05;
  const double half_width = sd * std::sqrt(3.0);  // uniform with the same variance
  std::vector<double> ts;
  for (int r = 0; r < 2000; ++r) {
    // Different laws with equal mean and covariance.
    const PixelRows a = gaussian_rows(400, rng, mu, sd);
    PixelRows b = testing::uniform_rows(400, rng, -half_width, half_width);
    b.rowwise() += mu.transpose();
    ts.push_back(t_statistic(sample_stats(a), sample_stats(b)));
  }
  const double mean = std::accumulate(ts.begin(), ts.end(), 0.0) / 2000.0;
  CHECK(mean > 2.8);
  CHECK(mean < 3.2);
  std::sort(ts.begin(), ts.end());
  const boost::math::chi_squared_distribution<double> chi(3);
  double ks = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double f = boost::math::cdf(chi, ts[i]);
    ks = std::max({ks, f - i / 2000.0, (i + 1) / 2000.0 - f});
  }
  CHECK(ks < 0.05);
}

TEST_CASE("a singular pooled covariance without ridge is degenerate") {
  const SampleStats c1{10, Eigen::Vector3d::Constant(0.2), Eigen::Matrix3d::Zero()};
  const SampleStats c2{10, Eigen::Vector3d::Constant(0.3), Eigen::Matrix3d::Zero()};
  CHECK_THROWS_AS(t_statistic(c1, c2, 0.0), DegenerateError);
  // With the default ridge the same pair is finite (and very large).
  CHECK(t_statistic(c1, c2) > 1e6);
}

TEST_CASE("classify: test equal to a reference is forest for any positive threshold") {
  std::mt19937_64 rng(15);
  const auto ref = sample_stats(testing::uniform_rows(100, rng, 0.1, 0.3));
  const auto other = sample_stats(testing::uniform_rows(100, rng, 0.5, 0.7));
  const MdcModel model = model_of({other, ref}, 1e-6);
  const Decision d = classify(ref, model);
  CHECK(d.t_min == 0.0);
  CHECK(d.label == Label::Forest);
  CHECK(d.best_reference == 1);
}

TEST_CASE("classify: far-shifted mean is non-forest") {
  std::mt19937_64 rng(16);
  std::vector<SampleStats> refs;
  for (int i = 0; i < 5; ++i) refs.push_back(sample_stats(gaussian_rows(100, rng, {0.2, 0.25, 0.2}, 0.01)));
  const auto test = sample_stats(gaussian_rows(100, rng, {0.7, 0.75, 0.7}, 0.01));
  const Decision d = classify(test, model_of(refs, 200.0));
  CHECK(d.label == Label::NonForest);
  CHECK(d.t_min > 1e4);
}

TEST_CASE("classify: T_min equal to the threshold is non-forest") {
  const auto a = diag_stats(50, {0.2, 0.3, 0.4}, {0.01, 0.01, 0.01});
  const auto b = diag_stats(50, {0.21, 0.3, 0.4}, {0.01, 0.01, 0.01});
  const double t = t_statistic(a, b);
  CHECK(classify(a, model_of({b}, t)).label == Label::NonForest);
  CHECK(classify(a, model_of({b}, std::nextafter(t, 1e9))).label == Label::Forest);
  CHECK(decide(1.0, 1.0) == Label::NonForest);
}

TEST_CASE("classify needs references and a valid threshold") {
  const auto a = diag_stats(50, {0.2, 0.3, 0.4}, {0.01, 0.01, 0.01});
  CHECK_THROWS_AS(classify(a, model_of({}, 1.0)), InvalidArgument);
  CHECK_THROWS_AS(classify(a, model_of({a}, -1.0)), InvalidArgument);
}

TEST_CASE("classify does not depend on reference order") {
  std::mt19937_64 rng(17);
  std::vector<SampleStats> refs;
  for (int i = 0; i < 8; ++i) refs.push_back(sample_stats(testing::uniform_rows(50, rng, 0.0, 0.5 + 0.05 * i)));
  const auto test = sample_stats(testing::uniform_rows(50, rng, 0.0, 0.6));
  const Decision base = classify(test, model_of(refs, 5.0));
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(refs.begin(), refs.end(), rng);
    const Decision d = classify(test, model_of(refs, 5.0));
    CHECK(d.t_min == base.t_min);
    CHECK(d.label == base.label);
  }
}

TEST_CASE("degenerate pairs count as infinity and classify as non-forest") {
  const SampleStats c{10, Eigen::Vector3d::Constant(0.2), Eigen::Matrix3d::Zero()};
  MdcModel model = model_of({c}, 10.0);
  model.ridge = 0.0;
  const Decision d = classify(c, model);
  CHECK(std::isinf(d.t_min));
  CHECK(d.degenerate);
  CHECK(d.label == Label::NonForest);
}
