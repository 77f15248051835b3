#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

#include "cellqos/error.hpp"
#include "cellqos/kernels.hpp"
#include "cellqos/rng.hpp"

using namespace cellqos;

namespace {

// Distance in units in the last place between two finite doubles of equal sign.
std::int64_t ulp_distance(double a, double b) {
  std::int64_t ia, ib;
  std::memcpy(&ia, &a, sizeof a);
  std::memcpy(&ib, &b, sizeof b);
  return ia > ib ? ia - ib : ib - ia;
}

struct GainCase {
  std::vector<double> xs, ys, normals;
  kernels::GainInputs in;
};

GainCase random_case(std::size_t n, std::uint64_t seed, double sigma, double width) {
  GainCase c;
  Xoshiro256pp rng(seed);
  const double height = width * std::sqrt(3.0) / 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    c.xs.push_back((rng.uniform() - 0.5) * width);
    c.ys.push_back((rng.uniform() - 0.5) * height);
  }
  c.normals.resize(n);
  LaneRng lanes(rng());
  kernels::scalar::fill_normal(lanes, c.normals);
  c.in.xs = c.xs;
  c.in.ys = c.ys;
  c.in.user_x = (rng.uniform() - 0.5) * width;
  c.in.user_y = (rng.uniform() - 0.5) * height;
  c.in.width = width;
  c.in.height = height;
  c.in.half_beta = 1.75;
  c.in.min_sq_dist = 1e-12;
  if (sigma > 0.0) {
    c.in.sigma = sigma;
    c.in.normals = c.normals;
  }
  return c;
}

}  // namespace

TEST_CASE("derived seeds and generators") {
  CHECK(derive_seed(1, StreamTag::kFactorSample, 0) == derive_seed(1, StreamTag::kFactorSample, 0));
  CHECK(derive_seed(1, StreamTag::kFactorSample, 0) != derive_seed(1, StreamTag::kFactorSample, 1));
  CHECK(derive_seed(1, StreamTag::kFactorSample, 0) != derive_seed(2, StreamTag::kFactorSample, 0));
  CHECK(derive_seed(1, StreamTag::kFactorSample, 0) != derive_seed(1, StreamTag::kBlockingRealization, 0));

  Xoshiro256pp a(5), b(5);
  for (int i = 0; i < 10; ++i) CHECK(a() == b());
  for (int i = 0; i < 10000; ++i) {
    const double u = a.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(bits_to_unit(0) == 0.0);
  CHECK(bits_to_unit(~std::uint64_t{0}) == 1.0 - std::ldexp(1.0, -52));
}

TEST_CASE("lane generator lanes are independent xoshiro streams") {
  LaneRng lanes(12);
  std::uint64_t out[4];
  lanes.next(out);
  CHECK(out[0] != out[1]);
  CHECK(out[2] != out[3]);
}

TEST_CASE("level selection") {
  const auto saved = kernels::active_level();
  kernels::set_level(kernels::Level::Scalar);
  CHECK(kernels::active_level() == kernels::Level::Scalar);
  kernels::set_level(kernels::Level::Avx2);
  CHECK(kernels::active_level() == kernels::detected_level());
  kernels::set_level(saved);
  CHECK(std::string(kernels::level_name(kernels::Level::Scalar)) == "scalar");
  MESSAGE("detected kernel level: " << std::string(kernels::level_name(kernels::detected_level())));
}

TEST_CASE("scalar uniforms") {
  LaneRng lanes(3);
  std::vector<double> u(10001);
  kernels::scalar::fill_uniform(lanes, u);
  double sum = 0.0;
  for (double x : u) {
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
    sum += x;
  }
  CHECK(sum / u.size() == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("scalar normals have unit variance") {
  LaneRng lanes(4);
  std::vector<double> z(40000);
  kernels::scalar::fill_normal(lanes, z);
  double sum = 0.0, sum_sq = 0.0;
  for (double x : z) {
    sum += x;
    sum_sq += x * x;
  }
  const double n = static_cast<double>(z.size());
  CHECK(std::abs(sum / n) < 4.0 / std::sqrt(n));
  CHECK(sum_sq / n == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("scalar gain reduce against a direct loop") {
  const auto c = random_case(257, 8, 1.2, 12.0);
  const auto g = kernels::scalar::gain_reduce(c.in);
  double sum = 0.0, best = -1.0, nearest = 1e300;
  std::size_t arg = 0, near = 0;
  for (std::size_t i = 0; i < c.xs.size(); ++i) {
    double dx = std::abs(c.xs[i] - c.in.user_x), dy = std::abs(c.ys[i] - c.in.user_y);
    dx = std::min(dx, c.in.width - dx);
    dy = std::min(dy, c.in.height - dy);
    const double d2 = std::max(dx * dx + dy * dy, c.in.min_sq_dist);
    const double gain = std::exp(c.in.sigma * c.normals[i] - c.in.sigma * c.in.sigma / 2) * std::pow(d2, -c.in.half_beta);
    sum += gain;
    if (gain > best) best = gain, arg = i;
    if (d2 < nearest) nearest = d2, near = i;
  }
  CHECK(g.sum == doctest::Approx(sum).epsilon(1e-12));
  CHECK(g.max_gain == doctest::Approx(best).epsilon(1e-12));
  CHECK(g.argmax == arg);
  CHECK(g.nearest == near);
  CHECK(g.nearest_sq_dist == doctest::Approx(nearest).epsilon(1e-14));
}

TEST_CASE("gain reduce validates its inputs") {
  auto c = random_case(8, 1, 1.0, 6.0);
  std::vector<double> short_ys(7);
  c.in.ys = short_ys;
  CHECK_THROWS_AS(kernels::gain_reduce(c.in), Error);
  c.in.xs = {};
  c.in.ys = {};
  c.in.normals = {};
  CHECK_THROWS_AS(kernels::gain_reduce(c.in), Error);
}

#ifdef CELLQOS_HAVE_AVX2_KERNELS

TEST_CASE("avx2 kernels agree with the scalar reference") {
  if (kernels::detected_level() != kernels::Level::Avx2) {
    MESSAGE("AVX2 not available; skipping equivalence checks");
    return;
  }

  SUBCASE("uniforms are bit-identical") {
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 1000u, 1023u}) {
      LaneRng a(99), b(99);
      std::vector<double> x(n), y(n);
      kernels::scalar::fill_uniform(a, x);
      kernels::avx2::fill_uniform(b, y);
      CHECK(x == y);
      CHECK(std::memcmp(a.state, b.state, sizeof a.state) == 0);
    }
  }

  SUBCASE("normals agree to a few ulp and consume the same bits") {
    for (std::size_t n : {1u, 7u, 8u, 9u, 4096u, 10001u}) {
      LaneRng a(21), b(21);
      std::vector<double> x(n), y(n);
      kernels::scalar::fill_normal(a, x);
      kernels::avx2::fill_normal(b, y);
      CHECK(std::memcmp(a.state, b.state, sizeof a.state) == 0);
      for (std::size_t i = 0; i < n; ++i) {
        const double tol = 1e-15 * std::max(1.0, std::abs(x[i])) + 4e-16;
        CHECK(std::abs(x[i] - y[i]) <= tol * 8);
      }
    }
  }

  SUBCASE("exp and log") {
    std::vector<double> in, ref(4001), out(4001);
    for (int i = 0; i <= 4000; ++i) in.push_back(-708.0 + 1417.0 * i / 4000.0);
    kernels::scalar::exp_array(in, ref);
    kernels::avx2::exp_array(in, out);
    for (std::size_t i = 0; i < in.size(); ++i) CHECK(ulp_distance(ref[i], out[i]) <= 4);

    std::vector<double> pos;
    for (int i = 0; i <= 4000; ++i) pos.push_back(std::ldexp(1.0 + i / 4000.0, i / 4 - 500));
    pos.push_back(1.0);
    pos.push_back(std::nextafter(1.0, 2.0));
    pos.push_back(std::nextafter(1.0, 0.0));
    std::vector<double> lref(pos.size()), lout(pos.size());
    kernels::scalar::log_array(pos, lref);
    kernels::avx2::log_array(pos, lout);
    for (std::size_t i = 0; i < pos.size(); ++i)
      CHECK(std::abs(lref[i] - lout[i]) <= 4e-16 * std::max(1.0, std::abs(lref[i])));

    std::vector<double> edge{800.0, -800.0, 0.0}, edge_out(3);
    kernels::avx2::exp_array(edge, edge_out);
    CHECK(std::isinf(edge_out[0]));
    CHECK(edge_out[1] == 0.0);
    CHECK(edge_out[2] == 1.0);
  }

  SUBCASE("gain reduce") {
    for (std::size_t n : {1u, 2u, 3u, 4u, 5u, 36u, 101u, 1039u}) {
      for (double sigma : {0.0, 1.38, 9.2}) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
          const auto c = random_case(n, seed * 31 + n, sigma, 10.0);
          const auto s = kernels::scalar::gain_reduce(c.in);
          const auto v = kernels::avx2::gain_reduce(c.in);
          CHECK(v.sum == doctest::Approx(s.sum).epsilon(1e-13));
          CHECK(v.max_gain == doctest::Approx(s.max_gain).epsilon(1e-13));
          CHECK(v.argmax == s.argmax);
          CHECK(v.nearest == s.nearest);
          CHECK(v.nearest_sq_dist == s.nearest_sq_dist);
          CHECK(v.nearest_gain == doctest::Approx(s.nearest_gain).epsilon(1e-13));
        }
      }
    }
  }

  SUBCASE("gain reduce ties go to the lowest index in both variants") {
    // eight stations on a circle around the user, all at distance 1
    std::vector<double> xs, ys;
    for (int i = 0; i < 8; ++i) {
      xs.push_back(i % 2 == 0 ? 1.0 : -1.0);
      ys.push_back(0.0);
    }
    kernels::GainInputs in;
    in.xs = xs;
    in.ys = ys;
    in.width = 10.0;
    in.height = 10.0;
    in.half_beta = 2.0;
    const auto s = kernels::scalar::gain_reduce(in);
    const auto v = kernels::avx2::gain_reduce(in);
    CHECK(s.argmax == 0);
    CHECK(v.argmax == 0);
    CHECK(s.nearest == 0);
    CHECK(v.nearest == 0);
    CHECK(v.sum == doctest::Approx(8.0));
  }
}

#endif
