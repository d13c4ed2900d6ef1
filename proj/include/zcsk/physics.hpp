#pragma once

#include <cstdint>
#include <limits>
#include <span>

#include "zcsk/rng.hpp"

namespace zcsk {

/// Boltzmann constant (J/K) as used throughout this codebase.
inline constexpr double kBoltzmann = 1.38e-23;

/// Marker for an unbounded (infinite) upper time limit in interval queries.
inline constexpr double kUnboundedTime =
    std::numeric_limits<double>::infinity();

/// Fluid and molecule constants feeding the Einstein relation.
struct MediumParams {
  double temperature_k;      // absolute temperature, K (> 0)
  double viscosity_pa_s;     // dynamic viscosity, Pa*s (> 0)
  double molecule_radius_m;  // hydrodynamic molecule radius, m (> 0)
};

/// One point-to-point diffusion link.
struct LinkGeometry {
  double distance_m;        // transmitter-receiver distance d, m (> 0)
  double diffusion_m2_s;    // diffusion coefficient D, m^2/s (> 0)
};

/// Throws std::domain_error unless all fields are positive and finite.
void validate(const MediumParams& medium);
void validate(const LinkGeometry& geometry);

/// Einstein relation: D = K_B * T / (6 pi eta r).
double einstein_diffusion(const MediumParams& medium);

/// First-passage-time density of a Brownian molecule over distance d:
///   f(t) = d / sqrt(4 pi D t^3) * exp(-d^2 / (4 D t)),  f(0) = 0.
/// This is a Levy(c) density with scale c = d^2 / (2 D).
/// Throws std::domain_error for t < 0.
double fpt_density(double t_s, const LinkGeometry& geometry);

/// P(first arrival <= t): erfc(d / sqrt(4 D t)); 0 at t <= 0, 1 at t = inf.
double hit_cdf(double t_s, const LinkGeometry& geometry);

/// P(first arrival in (t0, t1]) via the closed form
/// erfc(d/sqrt(4 D t1)) - erfc(d/sqrt(4 D t0)).
/// t1 may be kUnboundedTime. Throws std::domain_error unless 0 <= t0 <= t1.
double hit_probability(double t0_s, double t1_s, const LinkGeometry& geometry);

/// Scale parameter c = d^2 / (2 D) of the first-passage law.
double levy_scale(const LinkGeometry& geometry);

/// Draw one first-passage time: t = c / Z^2 with Z standard normal
/// (if first arrival of Brownian motion at distance d, then d/sqrt(2 D t)
/// is half-normal — inverting gives this transform). Z = 0 is redrawn.
double sample_hit_time(const LinkGeometry& geometry, rng::Xoshiro256pp& g);

/// Batch sampler used by the simulator hot path; runs on the active kernel
/// backend. Unlike the single-draw form, a Z = 0 draw (probability 2^-52
/// per pair) is mapped to +inf — "never arrives" — rather than redrawn,
/// which keeps the RNG word consumption fixed per call.
void sample_hit_times(const LinkGeometry& geometry, std::span<double> out,
                      rng::Xoshiro256pp& g);

}  // namespace zcsk
