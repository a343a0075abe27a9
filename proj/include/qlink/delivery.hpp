#pragma once

// On-demand delivery: every t_rep each of N parallel channels attempts to
// herald; the first herald is held in storage until the fixed delivery time,
// otherwise a classical anti-correlated state (fidelity 1/2) is delivered.

#include <vector>

#include "qlink/model.hpp"

namespace qlink {

/// Everything the delivery model needs once the protocol is reduced to numbers.
struct DeliveryModel {
    double p_her = 0.0;       // per channel, per attempt
    int n_parallel = 1;
    double f_her = 1.0;
    double t_rep_us = 1.0;
    double t_coh_us = 1.0;    // may be +inf
    double decoherence_multiplier = 1.0;

    /// Probability that at least one channel heralds in a round.
    double per_round_probability() const;
    /// Fidelity of a pair delivered after tau_us in storage (never below 1/2).
    double stored_fidelity(double tau_us) const;
    /// Decay rate per attempt period, exp(-multiplier * t_rep / T_coh).
    double decay_per_round() const;
};

DeliveryModel delivery_model(const LinkConfig& config);

struct DeliveryPoint {
    double t_del_us = 0.0;
    double p_success = 0.0;
    double f_del = 0.0;
};

/// Direct evaluation of the sum over herald rounds 1..rounds.
DeliveryPoint evaluate_delivery(const DeliveryModel& m, long rounds);

struct DeliveryCurve {
    std::vector<double> t_del_us;
    std::vector<double> p_success;
    std::vector<double> f_del;

    std::size_t size() const { return t_del_us.size(); }
};

/// Curve over t_del = k * t_rep for k = 1..max_rounds (OpenMP over grid points).
DeliveryCurve delivery_curve(const DeliveryModel& m, long max_rounds);
/// Single-threaded reference for delivery_curve; results are bit-identical.
DeliveryCurve delivery_curve_serial(const DeliveryModel& m, long max_rounds);

/// Full metrics at the configured t_del. Throws ConfigError if t_del < t_rep.
LinkMetrics delivered_fidelity(const LinkConfig& config);

inline constexpr long kDefaultMaxRounds = 1'000'000;

/// Number of grid points searched: ceil(10 * T_coh / t_rep), limited by the
/// memory lifetime when a memory is present and by max_rounds.
long search_rounds(const LinkConfig& config, long max_rounds = kDefaultMaxRounds);

struct DeliveryOptimum {
    long rounds = 0;
    double t_del_us = 0.0;
    double f_del = 0.0;
    double p_success = 0.0;
};

/// Discrete argmax of F_del over the search grid, ties to the smaller t_del.
/// config.policy.t_del_us is ignored. Throws NoOptimum if p_her = 0.
DeliveryOptimum optimal_delivery_time(const LinkConfig& config,
                                      long max_rounds = kDefaultMaxRounds);

/// Smallest grid t_del with F_del >= target. Throws DomainError for a target
/// outside (0.5, 1) and Unattainable when the best F_del is below it.
DeliveryOptimum min_time_to_fidelity(const LinkConfig& config, double target,
                                     long max_rounds = kDefaultMaxRounds);

struct ParallelSpeedup {
    double exact = 0.0;         // 1 - (1 - p)^n
    double approx = 0.0;        // n * p
    double relative_gap = 0.0;  // (approx - exact) / exact, 0 when exact = 0
};

ParallelSpeedup parallel_speedup(double p_her, int n);

}  // namespace qlink
