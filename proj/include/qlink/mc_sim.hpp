#pragma once

// Seeded Monte Carlo oracle for the delivery and distillation models.
//
// Every trial draws from its own stream keyed by (seed, trial index) and the
// per-chunk partial results are merged in chunk order, so the output is
// bit-identical for any OpenMP thread count.

#include <cstdint>
#include <optional>
#include <vector>

#include "qlink/delivery.hpp"
#include "qlink/model.hpp"

namespace qlink {

struct TrialRecord {
    std::optional<long> herald_round;  // 1-based
    std::optional<int> channel;        // in [0, N)
    double tau_us = 0.0;               // storage time; 0 on fallback
    double f_del = 0.5;
};

struct MCStats {
    std::uint64_t n_trials = 0;
    std::uint64_t seed = 0;
    long rounds = 0;
    double t_del_us = 0.0;
    double mean_f_del = 0.0;
    double std_error = 0.0;  // sample stddev / sqrt(n)
    double p_success = 0.0;
    std::vector<std::uint64_t> herald_histogram;  // index k-1 counts heralds at round k
    std::uint64_t failures = 0;

    bool operator==(const MCStats&) const = default;
};

/// One trial: every round, each channel heralds with probability p_her; the
/// lowest-index heralding channel in the first successful round wins.
TrialRecord simulate_trial(const DeliveryModel& m, long rounds, std::uint64_t seed,
                           std::uint64_t trial);

/// Rounds K = floor(t_del / t_rep) taken from the config.
MCStats run_trials(const LinkConfig& config, std::uint64_t n_trials, std::uint64_t seed);

/// OpenMP kernel over fixed-size trial chunks.
MCStats run_trials(const DeliveryModel& m, long rounds, std::uint64_t n_trials,
                   std::uint64_t seed);

/// Single-threaded reference: one pass with Welford accumulation.
MCStats run_trials_reference(const DeliveryModel& m, long rounds, std::uint64_t n_trials,
                             std::uint64_t seed);

inline constexpr std::uint64_t kMaxTrialRecords = 1'000'000;

/// Per-trial records for CSV dumps; throws DomainError above kMaxTrialRecords.
std::vector<TrialRecord> record_trials(const DeliveryModel& m, long rounds,
                                       std::uint64_t n_trials, std::uint64_t seed);

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    int bins = 0;
};

/// Goodness of fit of the herald-round histogram (plus the failure bin) to
/// the truncated geometric law (1-q)^(k-1) q. Adjacent bins are pooled until
/// each expects at least 5 counts.
ChiSquareResult herald_histogram_chi_square(const MCStats& stats, double per_round_probability);

struct DistillMCStats {
    std::uint64_t n_trials = 0;
    std::uint64_t seed = 0;
    int rounds = 0;
    double f_out = 0.0;
    double mean_pairs = 0.0;
    double pairs_std_error = 0.0;
    double expected_pairs = 0.0;  // analytic 2^rounds / prod(p_i)
    std::vector<std::uint64_t> attempts;   // per round
    std::vector<std::uint64_t> successes;  // per round
    std::vector<double> success_probability;  // analytic, per round

    double empirical_success_rate(int round) const {
        return attempts[round] ? static_cast<double>(successes[round]) /
                                     static_cast<double>(attempts[round])
                               : 0.0;
    }

    bool operator==(const DistillMCStats&) const = default;
};

/// Samples a nested recurrence tree per trial: a failed round discards both
/// inputs and rebuilds them from fresh pairs.
DistillMCStats run_distill_trials(double f_in, int rounds, std::uint64_t n_trials,
                                  std::uint64_t seed);

}  // namespace qlink
