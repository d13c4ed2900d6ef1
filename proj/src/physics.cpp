#include "zcsk/physics.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "zcsk/kern/kernels.hpp"
#include "kern/scalar_core.hpp"

namespace zcsk {
namespace {

constexpr double kPi = 3.14159265358979323846;

// exp(-x) underflows to 0 for x > ~745.1; beyond that the density term
// would evaluate as 0 * huge = NaN instead of the correct 0.
constexpr double kExpUnderflow = 745.0;

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::domain_error(std::string(what) +
                            " must be positive and finite");
  }
}

}  // namespace

void validate(const MediumParams& medium) {
  require_positive(medium.temperature_k, "temperature");
  require_positive(medium.viscosity_pa_s, "viscosity");
  require_positive(medium.molecule_radius_m, "molecule radius");
}

void validate(const LinkGeometry& geometry) {
  require_positive(geometry.distance_m, "distance");
  require_positive(geometry.diffusion_m2_s, "diffusion coefficient");
}

double einstein_diffusion(const MediumParams& medium) {
  validate(medium);
  return kBoltzmann * medium.temperature_k /
         (6.0 * kPi * medium.viscosity_pa_s * medium.molecule_radius_m);
}

double fpt_density(double t_s, const LinkGeometry& geometry) {
  validate(geometry);
  if (t_s < 0.0 || std::isnan(t_s)) {
    throw std::domain_error("fpt_density: t must be >= 0");
  }
  if (t_s == 0.0) return 0.0;
  const double d = geometry.distance_m;
  const double big_d = geometry.diffusion_m2_s;
  const double exponent = d * d / (4.0 * big_d * t_s);
  if (exponent > kExpUnderflow) return 0.0;
  return d / std::sqrt(4.0 * kPi * big_d * t_s * t_s * t_s) *
         std::exp(-exponent);
}

double hit_cdf(double t_s, const LinkGeometry& geometry) {
  validate(geometry);
  if (std::isnan(t_s)) throw std::domain_error("hit_cdf: t is NaN");
  if (t_s <= 0.0) return 0.0;
  // t = +inf gives erfc(0) = 1: the unbounded-limit marker needs no branch.
  return std::erfc(geometry.distance_m /
                   std::sqrt(4.0 * geometry.diffusion_m2_s * t_s));
}

double hit_probability(double t0_s, double t1_s,
                       const LinkGeometry& geometry) {
  validate(geometry);
  if (std::isnan(t0_s) || std::isnan(t1_s) || t0_s < 0.0 || t1_s < t0_s) {
    throw std::domain_error("hit_probability: need 0 <= t0 <= t1");
  }
  const double p = hit_cdf(t1_s, geometry) - hit_cdf(t0_s, geometry);
  // The CDF is monotone; clamp only shields against sub-ulp negatives.
  return p < 0.0 ? 0.0 : p;
}

double levy_scale(const LinkGeometry& geometry) {
  validate(geometry);
  return geometry.distance_m * geometry.distance_m /
         (2.0 * geometry.diffusion_m2_s);
}

double sample_hit_time(const LinkGeometry& geometry, rng::Xoshiro256pp& g) {
  const double scale = levy_scale(geometry);
  for (;;) {
    const kern::detail::NormalPair p = kern::detail::bm_pair(g.next(), g.next());
    if (p.z0 != 0.0) return kern::detail::levy_core(p.z0, scale);
    // z = 0 happens with probability 2^-52 per draw; redraw.
  }
}

void sample_hit_times(const LinkGeometry& geometry, std::span<double> out,
                      rng::Xoshiro256pp& g) {
  const double scale = levy_scale(geometry);
  const kern::Backend& backend = kern::active_backend();
  const std::size_t n = out.size();
  const std::size_t nwords = (n + 1) & ~std::size_t{1};
  std::vector<std::uint64_t> words(nwords);
  std::vector<double> normals(nwords);
  g.fill(words.data(), nwords);
  backend.normal_pairs(words.data(), nwords, normals.data());
  backend.levy_from_normal(normals.data(), n, scale, out.data());
}

}  // namespace zcsk
