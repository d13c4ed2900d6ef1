#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "support/quadrature.hpp"
#include "support/stats.hpp"
#include "zcsk/physics.hpp"

using namespace zcsk;

namespace {

const LinkGeometry kRefLink{32e-6, 8e-11};

}  // namespace

TEST_CASE("einstein_diffusion reproduces the textbook value") {
  const MediumParams medium{300.0, 1.0e-3, 2.5e-9};
  const double d = einstein_diffusion(medium);
  // K_B T / (6 pi eta r) at body-of-water conditions for a ~2.5 nm molecule.
  CHECK(d == doctest::Approx(8.785352858672623e-11).epsilon(1e-12));
  CHECK(d == doctest::Approx(8.786e-11).epsilon(1e-3));
}

TEST_CASE("einstein_diffusion scales exactly with its inputs") {
  const MediumParams medium{300.0, 1.0e-3, 2.5e-9};
  const double d = einstein_diffusion(medium);
  // Doubling the viscosity halves D exactly (power-of-two scaling commutes
  // with rounding).
  CHECK(einstein_diffusion({300.0, 2.0e-3, 2.5e-9}) == 0.5 * d);
  CHECK(einstein_diffusion({600.0, 1.0e-3, 2.5e-9}) == 2.0 * d);
  CHECK(einstein_diffusion({300.0, 1.0e-3, 5.0e-9}) == 0.5 * d);
}

TEST_CASE("validation rejects non-positive physical parameters") {
  CHECK_THROWS_AS(einstein_diffusion({0.0, 1e-3, 1e-9}), std::domain_error);
  CHECK_THROWS_AS(einstein_diffusion({300.0, -1e-3, 1e-9}), std::domain_error);
  CHECK_THROWS_AS(einstein_diffusion({300.0, 1e-3, 0.0}), std::domain_error);
  CHECK_THROWS_AS(validate(LinkGeometry{0.0, 1e-10}), std::domain_error);
  CHECK_THROWS_AS(validate(LinkGeometry{1e-6, -1e-10}), std::domain_error);
  CHECK_THROWS_AS(
      validate(LinkGeometry{std::numeric_limits<double>::infinity(), 1e-10}),
      std::domain_error);
}

TEST_CASE("fpt_density: boundary behavior and domain errors") {
  CHECK(fpt_density(0.0, kRefLink) == 0.0);
  CHECK_THROWS_AS(fpt_density(-1.0, kRefLink), std::domain_error);
  CHECK_THROWS_AS(fpt_density(std::numeric_limits<double>::quiet_NaN(),
                              kRefLink),
                  std::domain_error);
  // Deep left tail: the exponent underflow guard returns a clean zero.
  CHECK(fpt_density(1e-30, kRefLink) == 0.0);
  CHECK(fpt_density(1.0, kRefLink) > 0.0);
}

TEST_CASE("fpt_density peaks at d^2 / (6 D)") {
  const double t_star =
      kRefLink.distance_m * kRefLink.distance_m / (6.0 * kRefLink.diffusion_m2_s);
  const double peak = fpt_density(t_star, kRefLink);
  // Local maximum...
  CHECK(peak > fpt_density(t_star * 0.99, kRefLink));
  CHECK(peak > fpt_density(t_star * 1.01, kRefLink));
  // ...and the global one over a wide scan.
  double best_t = 0.0, best_f = -1.0;
  for (int i = 1; i <= 4000; ++i) {
    const double t = t_star * 0.01 * i;
    const double f = fpt_density(t, kRefLink);
    if (f > best_f) {
      best_f = f;
      best_t = t;
    }
  }
  CHECK(best_t == doctest::Approx(t_star).epsilon(0.02));
}

TEST_CASE("hit_cdf: limits, monotonicity, and density consistency") {
  CHECK(hit_cdf(0.0, kRefLink) == 0.0);
  CHECK(hit_cdf(-5.0, kRefLink) == 0.0);
  CHECK(hit_cdf(kUnboundedTime, kRefLink) == 1.0);
  CHECK_THROWS_AS(hit_cdf(std::numeric_limits<double>::quiet_NaN(), kRefLink),
                  std::domain_error);

  double prev = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const double f = hit_cdf(0.5 * i, kRefLink);
    CHECK(f >= prev);
    prev = f;
  }
  CHECK(prev < 1.0);

  // CDF is farther-is-later: decreasing in distance at fixed t.
  CHECK(hit_cdf(5.9, LinkGeometry{16e-6, 8e-11}) >
        hit_cdf(5.9, LinkGeometry{32e-6, 8e-11}));
}

TEST_CASE("hit_probability: interval algebra and domain errors") {
  const double a = 2.0, b = 5.9, c = 17.0;
  const double whole = hit_probability(a, c, kRefLink);
  const double split =
      hit_probability(a, b, kRefLink) + hit_probability(b, c, kRefLink);
  CHECK(whole == doctest::Approx(split).epsilon(1e-12));
  CHECK(hit_probability(b, b, kRefLink) == 0.0);
  CHECK(hit_probability(0.0, kUnboundedTime, kRefLink) == 1.0);
  CHECK_THROWS_AS(hit_probability(-1.0, 2.0, kRefLink), std::domain_error);
  CHECK_THROWS_AS(hit_probability(3.0, 2.0, kRefLink), std::domain_error);
}

TEST_CASE("closed-form interval probability agrees with quadrature") {
  // Spot checks across scales; the acceptance harness runs the full grid.
  const std::vector<LinkGeometry> links{
      {16e-6, 1e-11}, {32e-6, 8e-11}, {100e-6, 5e-10}};
  for (const LinkGeometry& link : links) {
    CAPTURE(link.distance_m);
    const double t_star =
        link.distance_m * link.distance_m / (6.0 * link.diffusion_m2_s);
    const auto f = [&](double t) { return fpt_density(t, link); };
    for (const auto& [t0, t1] : std::vector<std::pair<double, double>>{
             {0.2 * t_star, t_star},
             {t_star, 5.0 * t_star},
             {0.05 * t_star, 20.0 * t_star}}) {
      const double oracle = testing::integrate(f, t0, t1, 1e-13);
      CHECK(std::abs(hit_probability(t0, t1, link) - oracle) < 1e-10);
    }
  }
}

TEST_CASE("first-passage law is invariant under (d, D) -> (2d, 4D)") {
  const LinkGeometry scaled{2.0 * kRefLink.distance_m,
                            4.0 * kRefLink.diffusion_m2_s};
  CHECK(levy_scale(scaled) == levy_scale(kRefLink));
  for (const double t : {0.1, 1.0, 5.9, 123.0}) {
    CHECK(hit_cdf(t, scaled) == hit_cdf(t, kRefLink));
  }
}

TEST_CASE("levy_scale matches its definition") {
  CHECK(levy_scale(LinkGeometry{4.0, 2.0}) == 4.0);  // d^2 / (2 D)
  CHECK(levy_scale(kRefLink) ==
        doctest::Approx(32e-6 * 32e-6 / (2.0 * 8e-11)));
}

TEST_CASE("sample_hit_time draws positive finite times with the right law") {
  rng::Xoshiro256pp g(404);
  const std::size_t n = 100000;
  std::vector<double> draws(n);
  std::size_t within_slot = 0;
  for (auto& t : draws) {
    t = sample_hit_time(kRefLink, g);
    CHECK(t > 0.0);
    CHECK(std::isfinite(t));
    within_slot += t <= 5.9 ? 1 : 0;
  }
  // Fraction arriving within one slot matches the CDF to 4 sigma.
  const double p = hit_cdf(5.9, kRefLink);
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  CHECK(std::abs(static_cast<double>(within_slot) / n - p) < 4.0 * se);

  const double d = testing::ks_statistic(
      draws, [&](double t) { return hit_cdf(t, kRefLink); });
  CHECK(d < testing::ks_critical_1pct(n));
}

TEST_CASE("sample_hit_times batch is deterministic and lawful") {
  std::vector<double> a(4097), b(4097);
  {
    rng::Xoshiro256pp g(2717);
    sample_hit_times(kRefLink, a, g);
  }
  {
    rng::Xoshiro256pp g(2717);
    sample_hit_times(kRefLink, b, g);
  }
  CHECK(a == b);
  for (const double t : a) CHECK(t > 0.0);  // +inf allowed, never 0/negative

  const double d = testing::ks_statistic(
      a, [&](double t) { return hit_cdf(t, kRefLink); });
  CHECK(d < testing::ks_critical_1pct(a.size()));
}
