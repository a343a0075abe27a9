#include "qlink/delivery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qlink/errors.hpp"
#include "qlink/protocol.hpp"

namespace qlink {

namespace {

double one_minus_pow_complement(double p, double n) {
    // 1 - (1 - p)^n without cancellation for small p.
    if (p >= 1.0) return n > 0 ? 1.0 : 0.0;
    if (p <= 0.0) return 0.0;
    return -std::expm1(n * std::log1p(-p));
}

}  // namespace

double DeliveryModel::per_round_probability() const {
    return one_minus_pow_complement(p_her, n_parallel);
}

double DeliveryModel::decay_per_round() const {
    if (std::isinf(t_coh_us)) return 1.0;
    return std::exp(-decoherence_multiplier * t_rep_us / t_coh_us);
}

double DeliveryModel::stored_fidelity(double tau_us) const {
    const double decay =
        std::isinf(t_coh_us) ? 1.0 : std::exp(-decoherence_multiplier * tau_us / t_coh_us);
    return std::max(0.5, 0.5 + (f_her - 0.5) * decay);
}

DeliveryModel delivery_model(const LinkConfig& config) {
    require_valid(config);
    const auto a = analyze_protocol(config);
    DeliveryModel m;
    m.p_her = a.p_her;
    m.n_parallel = config.policy.n_parallel;
    m.f_her = heralded_fidelity(a, config.policy.fidelity_model);
    m.t_rep_us = config.transducer.t_rep_us;
    m.t_coh_us = config.qubit.t_coh_us;
    m.decoherence_multiplier = config.policy.decoherence_multiplier;
    return m;
}

DeliveryPoint evaluate_delivery(const DeliveryModel& m, long rounds) {
    const double q = m.per_round_probability();
    const double t_del = static_cast<double>(rounds) * m.t_rep_us;
    // Accumulate the excess over 1/2 so the floor holds exactly in floating point.
    double excess = 0.0;
    double miss = 1.0;  // (1 - q)^(k - 1)
    for (long k = 1; k <= rounds; ++k) {
        excess += miss * q * (m.stored_fidelity(t_del - static_cast<double>(k) * m.t_rep_us) - 0.5);
        miss *= 1.0 - q;
    }
    return {t_del, one_minus_pow_complement(q, static_cast<double>(rounds)), 0.5 + excess};
}

namespace {

DeliveryCurve allocate_curve(long max_rounds) {
    DeliveryCurve c;
    const auto n = static_cast<std::size_t>(std::max(0L, max_rounds));
    c.t_del_us.resize(n);
    c.p_success.resize(n);
    c.f_del.resize(n);
    return c;
}

void store(DeliveryCurve& c, long i, const DeliveryPoint& pt) {
    c.t_del_us[i] = pt.t_del_us;
    c.p_success[i] = pt.p_success;
    c.f_del[i] = pt.f_del;
}

}  // namespace

DeliveryCurve delivery_curve(const DeliveryModel& m, long max_rounds) {
    auto c = allocate_curve(max_rounds);
    // Later grid points are longer sums, so hand them out dynamically.
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < max_rounds; ++i) store(c, i, evaluate_delivery(m, i + 1));
    return c;
}

DeliveryCurve delivery_curve_serial(const DeliveryModel& m, long max_rounds) {
    auto c = allocate_curve(max_rounds);
    for (long i = 0; i < max_rounds; ++i) store(c, i, evaluate_delivery(m, i + 1));
    return c;
}

LinkMetrics delivered_fidelity(const LinkConfig& config) {
    const auto a = analyze_protocol(config);
    const auto m = delivery_model(config);
    const long rounds =
        static_cast<long>(std::floor(config.policy.t_del_us / m.t_rep_us + 1e-9));
    if (rounds < 1) throw ConfigError("timeout shorter than one attempt (t_del < t_rep)");

    const auto pt = evaluate_delivery(m, rounds);
    LinkMetrics out;
    out.p_her = a.p_her;
    out.i_prot = a.i_prot;
    out.i_th = a.i_th;
    out.f_her = m.f_her;
    out.eta_link = config.qubit.t_coh_us * a.p_her / m.t_rep_us;
    out.p_success = pt.p_success;
    out.f_del = pt.f_del;
    return out;
}

long search_rounds(const LinkConfig& config, long max_rounds) {
    const double t_rep = config.transducer.t_rep_us;
    double limit = static_cast<double>(max_rounds);
    const double t_coh = config.qubit.t_coh_us / config.policy.decoherence_multiplier;
    if (std::isfinite(t_coh)) limit = std::min(limit, std::ceil(10.0 * t_coh / t_rep));
    if (config.memory && std::isfinite(config.memory->lifetime_us))
        limit = std::min(limit, std::floor(config.memory->lifetime_us / t_rep + 1e-9));
    return std::max(1L, static_cast<long>(limit));
}

namespace {

// F_del(K) = 1/2 + (F_her - 1/2) S(K) with S(K) = d S(K-1) + q (1-q)^(K-1),
// valid when F_her >= 1/2 (otherwise every delivered state is the fallback).
template <typename Visit>
void scan_delivery(const DeliveryModel& m, long max_rounds, Visit&& visit) {
    const double q = m.per_round_probability();
    const double d = m.decay_per_round();
    const double amp = std::max(0.0, m.f_her - 0.5);
    double s = 0.0;
    double miss = 1.0;
    for (long k = 1; k <= max_rounds; ++k) {
        s = d * s + q * miss;
        miss *= 1.0 - q;
        const double p_success = one_minus_pow_complement(q, static_cast<double>(k));
        if (!visit(k, DeliveryPoint{static_cast<double>(k) * m.t_rep_us, p_success,
                                    0.5 + amp * s}))
            return;
    }
}

DeliveryModel model_ignoring_t_del(LinkConfig config) {
    // The search replaces t_del, so only require it to be a valid placeholder.
    config.policy.t_del_us = config.transducer.t_rep_us;
    return delivery_model(config);
}

}  // namespace

DeliveryOptimum optimal_delivery_time(const LinkConfig& config, long max_rounds) {
    const auto m = model_ignoring_t_del(config);
    if (m.p_her <= 0.0)
        throw Error(ErrorKind::NoOptimum, "p_her = 0: every t_del delivers the fallback state");
    DeliveryOptimum best;
    best.f_del = -std::numeric_limits<double>::infinity();
    scan_delivery(m, search_rounds(config, max_rounds), [&](long k, const DeliveryPoint& pt) {
        if (pt.f_del > best.f_del) best = {k, pt.t_del_us, pt.f_del, pt.p_success};
        return true;
    });
    return best;
}

DeliveryOptimum min_time_to_fidelity(const LinkConfig& config, double target, long max_rounds) {
    if (!(target > 0.5 && target < 1.0))
        throw Error(ErrorKind::Domain, "target fidelity must lie in (0.5, 1)");
    const auto m = model_ignoring_t_del(config);
    DeliveryOptimum found;
    bool hit = false;
    scan_delivery(m, search_rounds(config, max_rounds), [&](long k, const DeliveryPoint& pt) {
        if (pt.f_del >= target) {
            found = {k, pt.t_del_us, pt.f_del, pt.p_success};
            hit = true;
            return false;
        }
        return true;
    });
    if (!hit)
        throw Error(ErrorKind::Unattainable,
                    "target fidelity " + std::to_string(target) +
                        " is above the best achievable delivered fidelity");
    return found;
}

ParallelSpeedup parallel_speedup(double p_her, int n) {
    ParallelSpeedup s;
    s.exact = one_minus_pow_complement(p_her, n);
    s.approx = static_cast<double>(n) * p_her;
    s.relative_gap = s.exact > 0.0 ? (s.approx - s.exact) / s.exact : 0.0;
    return s;
}

}  // namespace qlink
