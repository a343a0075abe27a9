#include "qlink/mc_sim.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "qlink/distillation.hpp"
#include "qlink/errors.hpp"
#include "qlink/rng.hpp"

namespace qlink {

namespace {

constexpr std::uint64_t kChunk = 4096;

// Running moments for one chunk of trials.
struct Moments {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }

    void merge(const Moments& o) {
        if (o.n == 0) return;
        if (n == 0) { *this = o; return; }
        const double total = static_cast<double>(n + o.n);
        const double delta = o.mean - mean;
        mean += delta * static_cast<double>(o.n) / total;
        m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) / total;
        n += o.n;
    }
};

struct Partial {
    Moments f;
    std::vector<std::uint64_t> histogram;
    std::uint64_t failures = 0;

    void add(const TrialRecord& r) {
        f.add(r.f_del);
        if (r.herald_round) ++histogram[*r.herald_round - 1];
        else ++failures;
    }
};

MCStats finish(const DeliveryModel& m, long rounds, std::uint64_t n_trials, std::uint64_t seed,
               const Moments& f, std::vector<std::uint64_t> histogram, std::uint64_t failures) {
    MCStats s;
    s.n_trials = n_trials;
    s.seed = seed;
    s.rounds = rounds;
    s.t_del_us = static_cast<double>(rounds) * m.t_rep_us;
    s.mean_f_del = f.mean;
    const double var = n_trials > 1 ? f.m2 / static_cast<double>(n_trials - 1) : 0.0;
    s.std_error = std::sqrt(var / static_cast<double>(n_trials));
    s.failures = failures;
    s.p_success = static_cast<double>(n_trials - failures) / static_cast<double>(n_trials);
    s.herald_histogram = std::move(histogram);
    return s;
}

void check_trials(std::uint64_t n_trials, long rounds) {
    if (n_trials < 1) throw Error(ErrorKind::Domain, "n_trials must be >= 1");
    if (rounds < 1) throw ConfigError("timeout shorter than one attempt (t_del < t_rep)");
}

}  // namespace

TrialRecord simulate_trial(const DeliveryModel& m, long rounds, std::uint64_t seed,
                           std::uint64_t trial) {
    TrialStream rng(seed, trial);
    const double t_del = static_cast<double>(rounds) * m.t_rep_us;
    TrialRecord r;
    for (long k = 1; k <= rounds; ++k) {
        for (int c = 0; c < m.n_parallel; ++c) {
            if (!rng.bernoulli(m.p_her)) continue;
            r.herald_round = k;
            r.channel = c;
            r.tau_us = t_del - static_cast<double>(k) * m.t_rep_us;
            r.f_del = m.stored_fidelity(r.tau_us);
            return r;
        }
    }
    return r;
}

MCStats run_trials(const LinkConfig& config, std::uint64_t n_trials, std::uint64_t seed) {
    const auto m = delivery_model(config);
    const long rounds = static_cast<long>(std::floor(config.policy.t_del_us / m.t_rep_us + 1e-9));
    return run_trials(m, rounds, n_trials, seed);
}

MCStats run_trials(const DeliveryModel& m, long rounds, std::uint64_t n_trials,
                   std::uint64_t seed) {
    check_trials(n_trials, rounds);
    const std::uint64_t n_chunks = (n_trials + kChunk - 1) / kChunk;
    std::vector<Partial> partials(n_chunks);

#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(n_chunks); ++c) {
        Partial& p = partials[c];
        p.histogram.assign(static_cast<std::size_t>(rounds), 0);
        const std::uint64_t begin = static_cast<std::uint64_t>(c) * kChunk;
        const std::uint64_t end = std::min(n_trials, begin + kChunk);
        for (std::uint64_t t = begin; t < end; ++t) p.add(simulate_trial(m, rounds, seed, t));
    }

    Moments f;
    std::vector<std::uint64_t> histogram(static_cast<std::size_t>(rounds), 0);
    std::uint64_t failures = 0;
    for (const auto& p : partials) {
        f.merge(p.f);
        for (std::size_t k = 0; k < histogram.size(); ++k) histogram[k] += p.histogram[k];
        failures += p.failures;
    }
    return finish(m, rounds, n_trials, seed, f, std::move(histogram), failures);
}

MCStats run_trials_reference(const DeliveryModel& m, long rounds, std::uint64_t n_trials,
                             std::uint64_t seed) {
    check_trials(n_trials, rounds);
    Partial all;
    all.histogram.assign(static_cast<std::size_t>(rounds), 0);
    for (std::uint64_t t = 0; t < n_trials; ++t) all.add(simulate_trial(m, rounds, seed, t));
    return finish(m, rounds, n_trials, seed, all.f, std::move(all.histogram), all.failures);
}

std::vector<TrialRecord> record_trials(const DeliveryModel& m, long rounds,
                                       std::uint64_t n_trials, std::uint64_t seed) {
    check_trials(n_trials, rounds);
    if (n_trials > kMaxTrialRecords)
        throw Error(ErrorKind::Domain, "per-trial dump is limited to 1000000 rows");
    std::vector<TrialRecord> out(n_trials);
#pragma omp parallel for schedule(static)
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(n_trials); ++t)
        out[t] = simulate_trial(m, rounds, seed, static_cast<std::uint64_t>(t));
    return out;
}

ChiSquareResult herald_histogram_chi_square(const MCStats& stats, double q) {
    const double n = static_cast<double>(stats.n_trials);
    // Observed/expected per bin: rounds 1..K then the failure bin.
    std::vector<double> observed, expected;
    double miss = 1.0;
    for (std::size_t k = 0; k < stats.herald_histogram.size(); ++k) {
        observed.push_back(static_cast<double>(stats.herald_histogram[k]));
        expected.push_back(n * miss * q);
        miss *= 1.0 - q;
    }
    observed.push_back(static_cast<double>(stats.failures));
    expected.push_back(n * miss);

    // Pool left to right until each bin expects >= 5; fold a short tail back.
    std::vector<double> obs_pooled, exp_pooled;
    double o_acc = 0.0, e_acc = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        o_acc += observed[i];
        e_acc += expected[i];
        if (e_acc >= 5.0) {
            obs_pooled.push_back(o_acc);
            exp_pooled.push_back(e_acc);
            o_acc = e_acc = 0.0;
        }
    }
    if (e_acc > 0.0 || o_acc > 0.0) {
        if (exp_pooled.empty()) {
            obs_pooled.push_back(o_acc);
            exp_pooled.push_back(e_acc);
        } else {
            obs_pooled.back() += o_acc;
            exp_pooled.back() += e_acc;
        }
    }

    ChiSquareResult r;
    r.bins = static_cast<int>(exp_pooled.size());
    r.dof = r.bins - 1;
    for (std::size_t i = 0; i < exp_pooled.size(); ++i) {
        if (exp_pooled[i] <= 0.0) {
            if (obs_pooled[i] > 0.0) r.statistic = INFINITY;
            continue;
        }
        const double d = obs_pooled[i] - exp_pooled[i];
        r.statistic += d * d / exp_pooled[i];
    }
    if (r.dof < 1) {
        r.p_value = r.statistic == 0.0 ? 1.0 : 0.0;
    } else if (std::isinf(r.statistic)) {
        r.p_value = 0.0;
    } else {
        boost::math::chi_squared dist(r.dof);
        r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
    }
    return r;
}

namespace {

struct DistillTally {
    std::uint64_t pairs = 0;
    std::vector<std::uint64_t> attempts;
    std::vector<std::uint64_t> successes;
};

// Pairs consumed to produce one pair distilled to `level`.
std::uint64_t produce(int level, const std::vector<double>& p_success, TrialStream& rng,
                      DistillTally& tally) {
    if (level == 0) return 1;
    std::uint64_t used = 0;
    for (;;) {
        used += produce(level - 1, p_success, rng, tally);
        used += produce(level - 1, p_success, rng, tally);
        ++tally.attempts[level - 1];
        if (rng.bernoulli(p_success[level - 1])) {
            ++tally.successes[level - 1];
            return used;
        }
    }
}

}  // namespace

DistillMCStats run_distill_trials(double f_in, int rounds, std::uint64_t n_trials,
                                  std::uint64_t seed) {
    if (n_trials < 1) throw Error(ErrorKind::Domain, "n_trials must be >= 1");
    const auto analytic = nested_distill(f_in, rounds, DistillMode::Recurrence);

    const std::uint64_t n_chunks = (n_trials + kChunk - 1) / kChunk;
    std::vector<Moments> moments(n_chunks);
    std::vector<DistillTally> tallies(n_chunks);

#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(n_chunks); ++c) {
        auto& tally = tallies[c];
        tally.attempts.assign(rounds, 0);
        tally.successes.assign(rounds, 0);
        const std::uint64_t begin = static_cast<std::uint64_t>(c) * kChunk;
        const std::uint64_t end = std::min(n_trials, begin + kChunk);
        for (std::uint64_t t = begin; t < end; ++t) {
            TrialStream rng(seed, t);
            moments[c].add(static_cast<double>(produce(rounds, analytic.round_success, rng, tally)));
        }
    }

    DistillMCStats s;
    s.n_trials = n_trials;
    s.seed = seed;
    s.rounds = rounds;
    s.f_out = analytic.f_out;
    s.expected_pairs = analytic.expected_pairs;
    s.success_probability = analytic.round_success;
    s.attempts.assign(rounds, 0);
    s.successes.assign(rounds, 0);
    Moments all;
    for (std::uint64_t c = 0; c < n_chunks; ++c) {
        all.merge(moments[c]);
        for (int k = 0; k < rounds; ++k) {
            s.attempts[k] += tallies[c].attempts[k];
            s.successes[k] += tallies[c].successes[k];
        }
    }
    s.mean_pairs = all.mean;
    const double var = n_trials > 1 ? all.m2 / static_cast<double>(n_trials - 1) : 0.0;
    s.pairs_std_error = std::sqrt(var / static_cast<double>(n_trials));
    return s;
}

}  // namespace qlink
