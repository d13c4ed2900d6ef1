#include "zcsk/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace zcsk {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// Cells below this are treated as exactly zero in entropy sums.
constexpr double kCellFloor = 1e-300;

double entropy_term(double cell, double marginal_s, double marginal_r) {
  if (cell < kCellFloor) return 0.0;  // 0 * log 0 = 0 convention
  return cell * std::log2(cell / (marginal_s * marginal_r));
}

}  // namespace

void validate(const ChannelParams& params) {
  validate(params.geometry);
  if (params.molecules_per_symbol < 1) {
    throw std::domain_error("molecules_per_symbol must be >= 1");
  }
  if (!(params.slot_duration_s > 0.0) ||
      !std::isfinite(params.slot_duration_s)) {
    throw std::domain_error("slot_duration must be positive and finite");
  }
  if (!(params.inhibition_efficiency >= 0.0 &&
        params.inhibition_efficiency <= 1.0)) {
    throw std::domain_error("inhibition_efficiency must be in [0, 1]");
  }
  if (!(params.prior_one > 0.0 && params.prior_one < 1.0)) {
    throw std::domain_error("prior_one must be in (0, 1)");
  }
}

SlotProbabilities slot_probs(const ChannelParams& params) {
  validate(params);
  const double ts = params.slot_duration_s;
  const double p_current = hit_probability(0.0, ts, params.geometry);
  const double p_late = hit_probability(ts, 2.0 * ts, params.geometry);
  return SlotProbabilities{
      p_current,
      p_current + (1.0 - params.inhibition_efficiency) * p_late};
}

GaussianApprox current_count_dist(int n, const SlotProbabilities& p) {
  const double mean = n * p.current;
  return GaussianApprox{mean, mean * (1.0 - p.current)};
}

GaussianApprox current_count_dist(const ChannelParams& params) {
  return current_count_dist(params.molecules_per_symbol, slot_probs(params));
}

GaussianApprox isi_count_dist(int n, const SlotProbabilities& p) {
  const double var_cp = n * p.current_plus_isi * (1.0 - p.current_plus_isi);
  const double var_c = n * p.current * (1.0 - p.current);
  return GaussianApprox{n * (p.current_plus_isi - p.current), var_cp + var_c};
}

GaussianApprox isi_count_dist(const ChannelParams& params) {
  return isi_count_dist(params.molecules_per_symbol, slot_probs(params));
}

double gaussian_tail(double x) {
  // NaN reaches us only from a degenerate (variance-0) count with the
  // threshold exactly at the mean; the step-function limit assigns 1/2.
  if (std::isnan(x)) return 0.5;
  return 0.5 * std::erfc(x * kInvSqrt2);
}

double tail_above(double lambda, const GaussianApprox& dist) {
  if (dist.variance <= 0.0) {
    if (lambda > dist.mean) return 0.0;
    if (lambda < dist.mean) return 1.0;
    return 0.5;
  }
  return gaussian_tail((lambda - dist.mean) / std::sqrt(dist.variance));
}

ThresholdStatistics threshold_stats(int n, const SlotProbabilities& p,
                                    double lambda) {
  const GaussianApprox isi = isi_count_dist(n, p);
  const GaussianApprox cur = current_count_dist(n, p);
  // Degenerate variances produce +-inf (or NaN at the mean) here;
  // gaussian_tail turns those into the step-function limits.
  const double a1 = (lambda - isi.mean) / std::sqrt(isi.variance);
  const double a2 = (lambda - cur.mean) / std::sqrt(cur.variance);
  const double a3 = (lambda - (cur.mean + isi.mean)) /
                    std::sqrt(isi.variance + cur.variance);
  return ThresholdStatistics{a1, a2, a3};
}

ThresholdStatistics threshold_stats(const ChannelParams& params,
                                    double lambda) {
  return threshold_stats(params.molecules_per_symbol, slot_probs(params),
                         lambda);
}

JointDistribution joint_distribution(int n, const SlotProbabilities& p,
                                     double prior_one, double lambda) {
  const ThresholdStatistics a = threshold_stats(n, p, lambda);
  const double q = prior_one;
  const double q1 = gaussian_tail(a.isi_only);
  const double q2 = gaussian_tail(a.signal_only);
  const double q3 = gaussian_tail(a.signal_plus_isi);
  return JointDistribution{
      (1.0 - q) * (1.0 - q) + q * (1.0 - q) * (1.0 - q1),  // p00
      q * (1.0 - q) * q1,                                  // p01
      q * (1.0 - q) * (1.0 - q2) + q * q * (1.0 - q3),     // p10
      q * (1.0 - q) * q2 + q * q * q3,                     // p11
  };
}

JointDistribution joint_distribution(const ChannelParams& params,
                                     double lambda) {
  validate(params);
  return joint_distribution(params.molecules_per_symbol, slot_probs(params),
                            params.prior_one, lambda);
}

double symbol_error_prob(const ChannelParams& params, double lambda) {
  return joint_distribution(params, lambda).error_prob();
}

double mutual_information(const JointDistribution& joint) {
  const double s0 = joint.p00 + joint.p01;
  const double s1 = joint.p10 + joint.p11;
  const double r0 = joint.p00 + joint.p10;
  const double r1 = joint.p01 + joint.p11;
  return entropy_term(joint.p00, s0, r0) + entropy_term(joint.p01, s0, r1) +
         entropy_term(joint.p10, s1, r0) + entropy_term(joint.p11, s1, r1);
}

std::vector<double> integer_thresholds(int n) {
  std::vector<double> grid;
  grid.reserve(2 * n + 1);
  for (int lambda = 0; lambda <= 2 * n; ++lambda) {
    grid.push_back(static_cast<double>(lambda));
  }
  return grid;
}

namespace {

template <typename Score>
ThresholdOptimum best_over(std::span<const double> grid, bool maximize,
                           Score&& score) {
  if (grid.empty()) {
    throw std::domain_error("threshold grid must be nonempty");
  }
  ThresholdOptimum best{maximize ? -1.0 : 2.0, grid.front()};
  for (const double lambda : grid) {
    const double value = score(lambda);
    const bool better = maximize ? value > best.value : value < best.value;
    if (better) best = ThresholdOptimum{value, lambda};
    // Ties keep the earlier (smaller) threshold: grids are increasing.
  }
  return best;
}

}  // namespace

ThresholdOptimum capacity(const ChannelParams& params,
                          std::span<const double> lambda_grid) {
  validate(params);
  const SlotProbabilities p = slot_probs(params);
  return best_over(lambda_grid, /*maximize=*/true, [&](double lambda) {
    return mutual_information(joint_distribution(
        params.molecules_per_symbol, p, params.prior_one, lambda));
  });
}

ThresholdOptimum capacity(const ChannelParams& params) {
  const std::vector<double> grid =
      integer_thresholds(params.molecules_per_symbol);
  return capacity(params, grid);
}

ThresholdOptimum min_error_prob(const ChannelParams& params,
                                std::span<const double> lambda_grid) {
  validate(params);
  const SlotProbabilities p = slot_probs(params);
  return best_over(lambda_grid, /*maximize=*/false, [&](double lambda) {
    return joint_distribution(params.molecules_per_symbol, p,
                              params.prior_one, lambda)
        .error_prob();
  });
}

ThresholdOptimum min_error_prob(const ChannelParams& params) {
  const std::vector<double> grid =
      integer_thresholds(params.molecules_per_symbol);
  return min_error_prob(params, grid);
}

}  // namespace zcsk
