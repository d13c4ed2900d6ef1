#pragma once

#include <span>
#include <vector>

#include "zcsk/physics.hpp"

namespace zcsk {

/// One binary-CSK link configuration. A symbol 1 releases n molecules at
/// the slot start; a symbol 0 releases none. Under the zebra scheme,
/// inhibitor molecules destroy late (inter-symbol) arrivals with
/// probability beta.
struct ChannelParams {
  int molecules_per_symbol;       // n >= 1
  LinkGeometry geometry;          // d, D
  double slot_duration_s;         // Ts > 0
  double inhibition_efficiency;   // beta in [0, 1]
  double prior_one;               // q = P(S = 1), in (0, 1)
};

/// Throws std::domain_error on invariant violations.
void validate(const ChannelParams& params);

/// Per-molecule slot arrival probabilities.
///   current:          p_c  = P(arrival within its own slot)
///   current_plus_isi: p_cp = p_c + (1 - beta) * P(arrival in the next slot)
struct SlotProbabilities {
  double current;
  double current_plus_isi;
};

SlotProbabilities slot_probs(const ChannelParams& params);

/// Mean/variance pair of a Gaussian count approximation.
struct GaussianApprox {
  double mean;
  double variance;
};

/// Same-slot count N_c ~ Binomial(n, p_c), Gaussian-approximated:
/// mean n*p_c, variance n*p_c*(1-p_c).
GaussianApprox current_count_dist(int n, const SlotProbabilities& p);
GaussianApprox current_count_dist(const ChannelParams& params);

/// Surviving previous-slot (ISI) count N_p, modeled as the difference of
/// two independent Gaussian counts: mean n*(p_cp - p_c), variance
/// n*p_cp*(1-p_cp) + n*p_c*(1-p_c). Note the variance is deliberately the
/// sum of both binomial variances (difference-of-independent-counts model),
/// not the binomial variance of the survivor count alone; the Monte Carlo
/// module quantifies the gap this approximation introduces.
GaussianApprox isi_count_dist(int n, const SlotProbabilities& p);
GaussianApprox isi_count_dist(const ChannelParams& params);

/// Standard normal tail Q(x) = P(Z > x) = erfc(x / sqrt(2)) / 2.
/// Q(NaN) = 0.5 by convention: NaN arises only from degenerate
/// (variance-0) counts with the threshold exactly at the mean, where the
/// step-function limit assigns 1/2.
double gaussian_tail(double x);

/// Tail P(count >= lambda) of a Gaussian count approximation, with
/// degenerate variance handled by step semantics (0 above the mean,
/// 1 below, 0.5 at it).
double tail_above(double lambda, const GaussianApprox& dist);

/// Normalized threshold margins for the three count hypotheses at
/// threshold lambda (degenerate variances yield +-inf, or NaN when the
/// threshold sits exactly on the mean; gaussian_tail maps those to step
/// semantics):
///   isi_only:        a1 = (lambda - mean N_p)   / sd(N_p)
///   signal_only:     a2 = (lambda - n p_c)      / sd(N_c)
///   signal_plus_isi: a3 = (lambda - n p_cp)     / sqrt(var N_p + var N_c... )
/// where the signal-plus-isi variance is n*p_cp*(1-p_cp) + 2*n*p_c*(1-p_c).
struct ThresholdStatistics {
  double isi_only;
  double signal_only;
  double signal_plus_isi;
};

ThresholdStatistics threshold_stats(int n, const SlotProbabilities& p,
                                    double lambda);
ThresholdStatistics threshold_stats(const ChannelParams& params,
                                    double lambda);

/// Joint law of (sent symbol S, decoded symbol R) for the decision rule
/// "count >= lambda decodes 1" under one-slot ISI memory:
///   p00 = (1-q)^2 + q(1-q) * (1 - Q(a1))
///   p11 = q(1-q) * Q(a2) + q^2 * Q(a3)
///   p01 = q(1-q) * Q(a1)
///   p10 = q(1-q) * (1 - Q(a2)) + q^2 * (1 - Q(a3))
struct JointDistribution {
  double p00, p01, p10, p11;

  double sum() const { return p00 + p01 + p10 + p11; }
  double error_prob() const { return p01 + p10; }
  double correct_prob() const { return p00 + p11; }
};

JointDistribution joint_distribution(int n, const SlotProbabilities& p,
                                     double prior_one, double lambda);
JointDistribution joint_distribution(const ChannelParams& params,
                                     double lambda);

/// Symbol error probability Pe = p01 + p10 at threshold lambda.
double symbol_error_prob(const ChannelParams& params, double lambda);

/// Mutual information I(S;R) in bits of a 2x2 joint law, with the
/// 0*log(0) = 0 convention (cells below 1e-300 are treated as zero).
double mutual_information(const JointDistribution& joint);

/// The default threshold grid: integers 0..2n (counts are integers; the
/// analytic formulas accept real lambda, but optimization stays on-grid).
std::vector<double> integer_thresholds(int n);

/// Best achievable value over a threshold grid, with the achieving
/// threshold; ties break toward the smallest threshold.
struct ThresholdOptimum {
  double value;
  double threshold;
};

/// Channel capacity: max over the grid of I(S;R). Throws std::domain_error
/// on an empty grid.
ThresholdOptimum capacity(const ChannelParams& params,
                          std::span<const double> lambda_grid);
ThresholdOptimum capacity(const ChannelParams& params);  // 0..2n grid

/// Minimum symbol error probability over a threshold grid.
ThresholdOptimum min_error_prob(const ChannelParams& params,
                                std::span<const double> lambda_grid);
ThresholdOptimum min_error_prob(const ChannelParams& params);  // 0..2n grid

}  // namespace zcsk
