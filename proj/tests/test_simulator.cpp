#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "support/binomial_oracle.hpp"
#include "support/stats.hpp"
#include "zcsk/kern/kernels.hpp"
#include "zcsk/simulator.hpp"
#include "zcsk/sweep.hpp"

using namespace zcsk;

namespace {

double calibrated_diffusion() {
  static const double d =
      calibrate_diffusion(0.069,
                          ChannelParams{100, LinkGeometry{32e-6, 1.0}, 5.9,
                                        0.0, 0.5})
          .diffusion_m2_s;
  return d;
}

SimConfig reference_sim(double beta, int num_slots,
                        std::uint64_t seed = 1) {
  SimConfig config;
  config.channel =
      ChannelParams{100, LinkGeometry{32e-6, calibrated_diffusion()}, 5.9,
                    beta, 0.5};
  config.scheme = Scheme::zebra;
  config.num_slots = num_slots;
  config.master_seed = seed;
  return config;
}

std::uint32_t total_count(const std::array<std::uint32_t, 2>& c) {
  return c[0] + c[1];
}

}  // namespace

TEST_CASE("config validation rejects degenerate stream shapes") {
  SimConfig config = reference_sim(0.5, 100);
  config.num_slots = 1;
  CHECK_THROWS_AS(validate(config), std::domain_error);
  config.num_slots = 100;
  config.isi_memory_slots = 0;
  CHECK_THROWS_AS(validate(config), std::domain_error);
  config.isi_memory_slots = 100;
  CHECK_THROWS_AS(validate(config), std::domain_error);
  config.isi_memory_slots = 99;
  CHECK_NOTHROW(validate(config));
}

TEST_CASE("generate_symbols: reproducible Bernoulli stream") {
  rng::Xoshiro256pp g1(99), g2(99);
  const SymbolStream a = generate_symbols(0.5, 20000, g1);
  const SymbolStream b = generate_symbols(0.5, 20000, g2);
  CHECK(a.symbols == b.symbols);
  CHECK(a.symbols.size() == 20000);

  std::size_t ones = 0;
  for (const auto s : a.symbols) {
    CHECK((s == 0 || s == 1));
    ones += s;
  }
  const double frac = static_cast<double>(ones) / 20000.0;
  CHECK(std::abs(frac - 0.5) < 4.0 * std::sqrt(0.25 / 20000.0));

  // Skewed prior lands near its mean too.
  rng::Xoshiro256pp g3(7);
  const SymbolStream c = generate_symbols(0.1, 20000, g3);
  std::size_t c_ones = 0;
  for (const auto s : c.symbols) c_ones += s;
  CHECK(std::abs(static_cast<double>(c_ones) / 20000.0 - 0.1) <
        4.0 * std::sqrt(0.1 * 0.9 / 20000.0));

  CHECK_THROWS_AS(generate_symbols(0.0, 10, g3), std::domain_error);
  CHECK_THROWS_AS(generate_symbols(1.0, 10, g3), std::domain_error);
}

TEST_CASE("bin_emission conserves arrivals and respects window edges") {
  const std::vector<double> times{0.5, 5.9, 6.0, 11.8, 40.0,
                                  std::numeric_limits<double>::infinity()};
  const EmissionBins bins = bin_emission(times, 5.9, 2);
  REQUIRE(bins.by_offset.size() == 3);
  CHECK(bins.by_offset[0] == 2);  // 0.5 and the right edge 5.9
  CHECK(bins.by_offset[1] == 2);  // 6.0 and the right edge 11.8
  CHECK(bins.by_offset[2] == 0);
  CHECK(bins.beyond_horizon == 2);  // 40.0 and +inf
  std::uint32_t seen = bins.beyond_horizon;
  for (const auto k : bins.by_offset) seen += k;
  CHECK(seen == times.size());

  CHECK_THROWS_AS(bin_emission(times, 0.0, 1), std::domain_error);
  CHECK_THROWS_AS(bin_emission(times, 5.9, -1), std::domain_error);
}

TEST_CASE("sample_stream is deterministic in (seed, trial) only") {
  const SimConfig config = reference_sim(0.5, 400);
  const StreamSample a = sample_stream(config, 3);
  const StreamSample b = sample_stream(config, 3);
  CHECK(a.stream.symbols == b.stream.symbols);
  CHECK(a.counts == b.counts);

  const StreamSample other_trial = sample_stream(config, 4);
  CHECK(a.counts != other_trial.counts);

  SimConfig reseeded = config;
  reseeded.master_seed = 2;
  const StreamSample other_seed = sample_stream(reseeded, 3);
  CHECK(a.counts != other_seed.counts);
}

TEST_CASE("per-stream counts never exceed the emitted molecule budget") {
  const SimConfig config = reference_sim(0.5, 400);
  const StreamSample sample = sample_stream(config, 0);
  REQUIRE(sample.counts.size() == 400);
  std::uint64_t emitted = 0;
  for (const auto s : sample.stream.symbols) {
    emitted += s == 1 ? 100u : 0u;
  }
  std::uint64_t landed = 0;
  for (const auto& c : sample.counts) landed += total_count(c);
  CHECK(landed <= emitted);
  CHECK(landed > 0);
}

TEST_CASE("zebra with beta=0 equals plain csk decode-for-decode") {
  SimConfig zebra = reference_sim(0.0, 5000);
  SimConfig csk = zebra;
  csk.scheme = Scheme::csk;

  const StreamSample zs = sample_stream(zebra, 0);
  const StreamSample cs = sample_stream(csk, 0);
  REQUIRE(zs.counts.size() == cs.counts.size());
  // Type attribution differs (zebra alternates), totals are identical.
  for (std::size_t slot = 0; slot < zs.counts.size(); ++slot) {
    CHECK(total_count(zs.counts[slot]) == total_count(cs.counts[slot]));
  }
  const TrialReport zr = tally_stream(zs, zebra, 20.0);
  const TrialReport cr = tally_stream(cs, csk, 20.0);
  CHECK(zr.joint == cr.joint);
  CHECK(zr.errors == cr.errors);
  CHECK(zr.pe == cr.pe);
}

TEST_CASE("decode extremes: lambda=0 fires always, lambda>2n never") {
  const SimConfig config = reference_sim(0.5, 20000);
  const StreamSample sample = sample_stream(config, 0);

  const TrialReport always = tally_stream(sample, config, 0.0);
  CHECK(always.joint[0] == 0);  // sent 0, decoded 0: never
  CHECK(always.joint[2] == 0);  // sent 1, decoded 0: never
  CHECK(always.errors == always.joint[1]);
  CHECK(always.pe ==
        static_cast<double>(always.joint[1]) /
            static_cast<double>(always.slots_counted));

  // Memory 1 bounds any count by 2n; a threshold above that never fires.
  const TrialReport never = tally_stream(sample, config, 201.0);
  CHECK(never.joint[1] == 0);
  CHECK(never.joint[3] == 0);
  CHECK(never.errors == never.joint[2]);
  CHECK(never.pe ==
        static_cast<double>(never.joint[2]) /
            static_cast<double>(never.slots_counted));
}

TEST_CASE("deep ISI memory with an unreachable threshold errs at rate q") {
  SimConfig config = reference_sim(0.0, 20000);
  config.scheme = Scheme::csk;
  config.isi_memory_slots = 4;
  const TrialReport report =
      estimate_error_rate(config, 201.0, /*repetitions=*/1);
  // Pileup of five emissions could in principle reach 201 of 500, but at
  // this operating point it never does: decoding is all-zeros and the error
  // rate is the symbol rate of ones.
  CHECK(std::abs(report.pe - 0.5) < 4.0 * std::sqrt(0.25 / 20000.0));
}

TEST_CASE("warm-up slots are decoded but not counted") {
  SimConfig config = reference_sim(0.5, 1000);
  config.isi_memory_slots = 3;
  const SimulationResult result = simulate_stream(config, 20.0);
  CHECK(result.observations.size() == 1000);
  CHECK(result.report.slots_counted == 997);
  std::uint64_t total = 0;
  for (const auto cell : result.report.joint) total += cell;
  CHECK(total == 997);
}

TEST_CASE("estimate_error_rate pools independent trials") {
  const SimConfig config = reference_sim(0.5, 300);
  const TrialReport pooled = estimate_error_rate(config, 20.0, 4);
  CHECK(pooled.slots_counted == 4u * 299u);

  // Pooling is exactly the sum of the per-trial tallies.
  std::uint64_t errors = 0;
  std::array<std::uint64_t, 4> joint{};
  for (std::uint64_t trial = 0; trial < 4; ++trial) {
    const TrialReport t =
        tally_stream(sample_stream(config, trial), config, 20.0);
    errors += t.errors;
    for (std::size_t cell = 0; cell < 4; ++cell) joint[cell] += t.joint[cell];
  }
  CHECK(pooled.errors == errors);
  CHECK(pooled.joint == joint);

  // Trials are genuinely different draws.
  CHECK(sample_stream(config, 0).counts != sample_stream(config, 1).counts);
  CHECK_THROWS_AS(estimate_error_rate(config, 20.0, 0), std::domain_error);
}

TEST_CASE("decoded observations follow the threshold rule exactly") {
  const SimConfig config = reference_sim(0.5, 200);
  const SimulationResult result = simulate_stream(config, 25.0);
  for (const SlotObservation& obs : result.observations) {
    const std::uint32_t relevant = obs.count_a + obs.count_b;
    CHECK(obs.decoded == (relevant >= 25 ? 1 : 0));
  }
}

TEST_CASE("Monte Carlo error rates converge to the exact finite-sample law") {
  // The oracle is the exact binomial channel (not the Gaussian analytic
  // model, which carries a deliberate variance approximation).
  for (const double beta : {0.0, 0.5, 1.0}) {
    CAPTURE(beta);
    const SimConfig config = reference_sim(beta, 200000, /*seed=*/11);
    const testing::ExactChannel oracle = testing::exact_channel(config.channel);
    const double pe_exact = oracle.error_prob(20.0);

    const TrialReport report =
        tally_stream(sample_stream(config, 0), config, 20.0);
    const double se = std::sqrt(pe_exact * (1.0 - pe_exact) /
                                static_cast<double>(report.slots_counted));
    CHECK(std::abs(report.pe - pe_exact) < 4.0 * se + 5e-4);
  }
}

TEST_CASE("Monte Carlo joint cells converge to the exact law cell by cell") {
  const SimConfig config = reference_sim(0.5, 200000, /*seed=*/12);
  const testing::ExactChannel oracle = testing::exact_channel(config.channel);
  const JointDistribution want = oracle.joint(20.0);
  const TrialReport report =
      tally_stream(sample_stream(config, 0), config, 20.0);
  const JointDistribution got = empirical_joint(report);
  const double n = static_cast<double>(report.slots_counted);
  const auto within = [&](double sample_p, double exact_p) {
    const double se = std::sqrt(exact_p * (1.0 - exact_p) / n);
    return std::abs(sample_p - exact_p) < 4.0 * se + 5e-4;
  };
  CHECK(within(got.p00, want.p00));
  CHECK(within(got.p01, want.p01));
  CHECK(within(got.p10, want.p10));
  CHECK(within(got.p11, want.p11));
}

TEST_CASE("full inhibition with every-slot inhibitors kills all ISI") {
  const SimConfig config = reference_sim(1.0, 30000, /*seed=*/13);
  const StreamSample sample = sample_stream(config, 0);
  // Memory-1 ISI always lands on the opposite messenger type; beta=1 wipes
  // it, so each slot holds only its own type.
  for (std::size_t slot = 0; slot < sample.counts.size(); ++slot) {
    const int own = static_cast<int>(slot & 1);
    CHECK(sample.counts[slot][static_cast<std::size_t>(1 - own)] == 0);
  }

  SimConfig typed = config;
  typed.counting = CountingMode::typed;
  const TrialReport total_report = tally_stream(sample, config, 20.0);
  const TrialReport typed_report = tally_stream(sample, typed, 20.0);
  CHECK(total_report.joint == typed_report.joint);
}

TEST_CASE("typed counting never sees more than total counting") {
  const SimConfig config = reference_sim(0.5, 5000, /*seed=*/14);
  const StreamSample sample = sample_stream(config, 0);
  SimConfig typed = config;
  typed.counting = CountingMode::typed;
  const auto total_obs = decode_stream(sample, config, 18.0);
  const auto typed_obs = decode_stream(sample, typed, 18.0);
  std::uint64_t total_fires = 0, typed_fires = 0;
  for (std::size_t i = 0; i < total_obs.size(); ++i) {
    total_fires += total_obs[i].decoded;
    typed_fires += typed_obs[i].decoded;
    CHECK(typed_obs[i].decoded <= total_obs[i].decoded);
  }
  CHECK(typed_fires <= total_fires);
}

TEST_CASE("on-emission inhibitors suppress strictly less than every-slot") {
  SimConfig every = reference_sim(0.9, 30000, /*seed=*/15);
  SimConfig lazy = every;
  lazy.inhibitor_policy = InhibitorPolicy::on_emission;
  const StreamSample se = sample_stream(every, 0);
  const StreamSample sl = sample_stream(lazy, 0);
  std::uint64_t landed_every = 0, landed_lazy = 0;
  for (std::size_t i = 0; i < se.counts.size(); ++i) {
    landed_every += total_count(se.counts[i]);
    landed_lazy += total_count(sl.counts[i]);
  }
  // Thinning only ever removes molecules; skipping it on silent slots keeps
  // strictly more at this stream length.
  CHECK(landed_lazy > landed_every);
}

TEST_CASE("ISI memory depth only adds arrivals for csk streams") {
  SimConfig shallow = reference_sim(0.0, 3000, /*seed=*/16);
  shallow.scheme = Scheme::csk;
  SimConfig deep = shallow;
  deep.isi_memory_slots = 2;
  // csk never consumes thinning draws, so the two runs share every hit time
  // and differ only in the extra tracked window.
  const StreamSample s1 = sample_stream(shallow, 0);
  const StreamSample s2 = sample_stream(deep, 0);
  for (std::size_t slot = 0; slot < s1.counts.size(); ++slot) {
    CHECK(total_count(s2.counts[slot]) >= total_count(s1.counts[slot]));
  }
}

TEST_CASE("wilson_ci: known answers and edge cases") {
  const WilsonInterval ci = wilson_ci(10, 100);
  CHECK(ci.low == doctest::Approx(0.0552).epsilon(2e-2));
  CHECK(ci.high == doctest::Approx(0.1744).epsilon(2e-2));
  CHECK(ci.low < 0.1);
  CHECK(ci.high > 0.1);

  const WilsonInterval zero = wilson_ci(0, 50);
  CHECK(zero.low == 0.0);
  CHECK(zero.high > 0.0);
  CHECK(zero.high < 0.15);

  const WilsonInterval all = wilson_ci(50, 50);
  CHECK(all.high == 1.0);
  CHECK(all.low < 1.0);

  const WilsonInterval empty = wilson_ci(0, 0);
  CHECK(empty.low == 0.0);
  CHECK(empty.high == 1.0);

  // Width shrinks like 1/sqrt(n).
  CHECK(wilson_ci(100, 1000).halfwidth > wilson_ci(1000, 10000).halfwidth);
}

TEST_CASE("mutual information estimate flags degenerate streams") {
  const SimConfig config = reference_sim(0.5, 5000, /*seed=*/17);
  const StreamSample sample = sample_stream(config, 0);

  // lambda=0 decodes everything as 1: decoded marginal collapses.
  const MiEstimate degenerate =
      estimate_mutual_information(tally_stream(sample, config, 0.0));
  CHECK(degenerate.degenerate_marginal);
  CHECK(degenerate.bits == 0.0);

  const MiEstimate healthy = estimate_mutual_information(config, 20.0);
  CHECK(!healthy.degenerate_marginal);
  CHECK(healthy.bits > 0.0);
  CHECK(healthy.bits <= 1.0);
}

TEST_CASE("mutual information estimate flags sparse cells") {
  // A short, clean stream: errors are so rare the error cells stay under 5.
  const SimConfig config = reference_sim(1.0, 120, /*seed=*/18);
  const MiEstimate estimate = estimate_mutual_information(config, 20.0);
  CHECK(estimate.low_cell_counts);
}

TEST_CASE("simulation results are backend-independent") {
  const kern::Backend* avx2 = kern::avx2_backend();
  if (avx2 == nullptr) {
    MESSAGE("AVX2 unavailable on this build/CPU; equivalence not exercised");
    return;
  }
  const SimConfig config = reference_sim(0.5, 2000, /*seed=*/19);
  kern::force_backend(&kern::scalar_backend());
  const StreamSample scalar_sample = sample_stream(config, 0);
  kern::force_backend(avx2);
  const StreamSample avx2_sample = sample_stream(config, 0);
  kern::force_backend(nullptr);
  CHECK(scalar_sample.counts == avx2_sample.counts);
}
