#include "qlink/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qlink/delivery.hpp"
#include "qlink/distillation.hpp"
#include "qlink/errors.hpp"

namespace qlink {

const char* to_string(ArchitectureKind kind) {
    switch (kind) {
        case ArchitectureKind::LatticeSurgery: return "lattice_surgery";
        case ArchitectureKind::SparseLinks: return "sparse_links";
        case ArchitectureKind::GraphState: return "graph_state";
    }
    return "unknown";
}

ArchitectureKind parse_architecture_kind(const std::string& name) {
    if (name == "lattice_surgery") return ArchitectureKind::LatticeSurgery;
    if (name == "sparse_links") return ArchitectureKind::SparseLinks;
    if (name == "graph_state") return ArchitectureKind::GraphState;
    throw ConfigError("unknown architecture '" + name +
                      "'; expected lattice_surgery, sparse_links or graph_state");
}

std::vector<Violation> validate(const ArchitectureSpec& s) {
    std::vector<Violation> out;
    auto add = [&](const char* field, const char* rule) {
        out.push_back({std::string("architecture.") + field, rule});
    };
    if (s.qubits_per_processor < 1) add("qubits_per_processor", "must be >= 1");
    if (!(s.clock_cycle_us > 0.0) || !std::isfinite(s.clock_cycle_us))
        add("clock_cycle_us", "must be > 0");
    if (s.transducer_budget < 1) add("transducer_budget", "must be >= 1");
    if (!(s.target_fidelity > 0.5 && s.target_fidelity < 1.0))
        add("target_fidelity", "out of (0.5,1)");
    if (s.code_distance < 1) add("code_distance", "must be >= 1");
    if (s.sparse_links < 1) add("sparse_links", "must be >= 1");
    if (s.circuit_budget < 1) add("circuit_budget", "must be >= 1");
    return out;
}

long edge_qubit_count(long n_qubits) {
    if (n_qubits < 1) throw Error(ErrorKind::Domain, "qubit count must be >= 1");
    auto r = static_cast<long>(std::sqrt(static_cast<double>(n_qubits)));
    while (r * r < n_qubits) ++r;
    while (r > 1 && (r - 1) * (r - 1) >= n_qubits) --r;
    return r;
}

int graph_state_pipe_width(int code_distance) {
    if (code_distance < 1) throw Error(ErrorKind::Domain, "code distance must be >= 1");
    return code_distance;
}

CryostatBudget cryostat_budget_check(long links, long transducers_per_link) {
    if (links < 1 || transducers_per_link < 1)
        throw Error(ErrorKind::Domain, "links and transducers per link must be >= 1");
    CryostatBudget b;
    b.links = links;
    b.transducers_per_link = transducers_per_link;
    b.total = links * transducers_per_link;
    b.links_in_envelope = links >= 10 && links <= 100;
    b.per_link_in_envelope = transducers_per_link >= 10 && transducers_per_link <= 100;
    b.total_in_envelope = b.total >= 100 && b.total <= 10000;
    return b;
}

CircuitCutComparison circuit_cut_comparison(double infidelity, std::uint64_t circuit_budget) {
    if (!(infidelity >= 0.0 && infidelity < 1.0))
        throw Error(ErrorKind::Domain, "infidelity must lie in [0, 1)");
    if (circuit_budget < 1) throw Error(ErrorKind::Domain, "circuit budget must be >= 1");

    constexpr double kClassicalLog10Gamma = 0.5;
    constexpr double kSlope = (0.5 - 0.1) / (kCircuitCutBreakEven - 0.10);
    const double log10_budget = std::log10(static_cast<double>(circuit_budget));
    const double log10_gamma_q = 0.1 + kSlope * (infidelity - 0.10);
    // Counts are floors of ratios that land on integers at the anchors.
    auto links_within = [&](double log10_gamma) {
        return static_cast<long>(std::floor(log10_budget / log10_gamma + 1e-9));
    };

    CircuitCutComparison c;
    c.gamma_classical = std::pow(10.0, kClassicalLog10Gamma);
    c.k_classical = links_within(kClassicalLog10Gamma);
    c.gamma_quantum = std::pow(10.0, log10_gamma_q);
    if (log10_gamma_q > 1e-12) c.k_quantum = links_within(log10_gamma_q);
    c.advantage = infidelity < kCircuitCutBreakEven;
    return c;
}

namespace {

void require_valid(const ArchitectureSpec& spec) {
    auto v = validate(spec);
    if (v.empty()) return;
    std::string msg = "invalid architecture:";
    for (const auto& e : v) msg += " [" + e.message() + "]";
    throw ConfigError(msg);
}

struct ChosenLink {
    double t_del_us = 0.0;
    double fidelity = 0.0;  // after distillation
};

double distilled(double f_del, int rounds) {
    if (rounds == 0 || f_del <= 0.5) return f_del;
    return calibrated_distill(f_del, rounds);
}

ChosenLink choose_t_del(const LinkConfig& link, double target) {
    const int rounds = link.policy.distill_rounds;
    const auto at_config = delivered_fidelity(link);
    const double f = distilled(at_config.f_del, rounds);
    if (f >= target) return {link.policy.t_del_us, f};

    // Raw delivered fidelity that distills up to the target.
    const double needed = 1.0 - (1.0 - target) * std::pow(10.0, rounds / 4.0);
    if (needed <= 0.5) {
        LinkConfig shortest = link;
        shortest.policy.t_del_us = link.transducer.t_rep_us;
        const auto m = delivered_fidelity(shortest);
        return {shortest.policy.t_del_us, distilled(m.f_del, rounds)};
    }
    const auto opt = min_time_to_fidelity(link, needed);
    return {opt.t_del_us, distilled(opt.f_del, rounds)};
}

void finish_feasibility(PlanReport& r, const ArchitectureSpec& spec) {
    r.qubits_for_communication = r.total_transducers;
    r.exceeds_module_ceiling = r.total_transducers > kModuleTransducerCeiling;
    r.below_link_error_threshold = 1.0 - r.link_fidelity < kLinkErrorThreshold;
    std::vector<std::string> limits;
    if (r.qubits_for_communication > spec.qubits_per_processor)
        limits.push_back("communication qubits exceed processor size");
    if (r.total_transducers > spec.transducer_budget)
        limits.push_back("transducer budget");
    r.feasible = limits.empty();
    if (limits.empty()) {
        r.limiting_factor = "none";
    } else {
        r.limiting_factor = limits.front();
        for (std::size_t i = 1; i < limits.size(); ++i) r.limiting_factor += "; " + limits[i];
    }
}

PlanReport base_report(const ArchitectureSpec& spec, const LinkConfig& link) {
    require_valid(spec);
    require_valid(link);
    const auto chosen = choose_t_del(link, spec.target_fidelity);
    PlanReport r;
    r.kind = spec.kind;
    r.t_del_us = chosen.t_del_us;
    r.link_fidelity = chosen.fidelity;
    r.n_parallel = link.policy.n_parallel;
    r.distill_rounds = link.policy.distill_rounds;
    return r;
}

}  // namespace

PlanReport lattice_surgery_plan(const ArchitectureSpec& spec, const LinkConfig& link) {
    auto r = base_report(spec, link);
    r.speedup = r.t_del_us / spec.clock_cycle_us;
    const long copies = std::max(1L, static_cast<long>(std::ceil(r.speedup - 1e-9)));
    r.transducers_per_link = static_cast<long>(r.n_parallel) * copies * (1L << r.distill_rounds);
    r.links = edge_qubit_count(spec.qubits_per_processor);
    r.total_transducers = r.links * r.transducers_per_link;
    finish_feasibility(r, spec);
    if (r.exceeds_module_ceiling)
        r.notes.push_back("more than 10000 transducers per module");
    return r;
}

PlanReport sparse_links_plan(const ArchitectureSpec& spec, const LinkConfig& link) {
    auto r = base_report(spec, link);
    r.transducers_per_link = static_cast<long>(r.n_parallel) * (1L << r.distill_rounds);
    r.links = spec.sparse_links;
    r.total_transducers = r.links * r.transducers_per_link;
    finish_feasibility(r, spec);
    const auto cut = circuit_cut_comparison(std::max(0.0, 1.0 - r.link_fidelity),
                                            spec.circuit_budget);
    if (!cut.advantage) {
        r.feasible = false;
        r.limiting_factor = r.limiting_factor == "none"
                                ? "no advantage over circuit cutting"
                                : r.limiting_factor + "; no advantage over circuit cutting";
    }
    r.notes.push_back("circuit-cut gamma model is calibrated to two anchor points");
    return r;
}

PlanReport graph_state_plan(const ArchitectureSpec& spec, const LinkConfig& link) {
    auto r = base_report(spec, link);
    r.transducers_per_link = static_cast<long>(r.n_parallel) * (1L << r.distill_rounds);
    r.links = graph_state_pipe_width(spec.code_distance);
    r.total_transducers = r.links * r.transducers_per_link;
    finish_feasibility(r, spec);
    return r;
}

PlanReport plan(const ArchitectureSpec& spec, const LinkConfig& link) {
    switch (spec.kind) {
        case ArchitectureKind::LatticeSurgery: return lattice_surgery_plan(spec, link);
        case ArchitectureKind::SparseLinks: return sparse_links_plan(spec, link);
        case ArchitectureKind::GraphState: return graph_state_plan(spec, link);
    }
    throw ConfigError("unknown architecture");
}

namespace {

DeliveryOptimum optimum_for(const LinkConfig& link, int n_parallel) {
    LinkConfig c = link;
    c.policy.n_parallel = n_parallel;
    c.policy.distill_rounds = 0;
    c.policy.t_del_us = c.transducer.t_rep_us;
    return optimal_delivery_time(c);
}

std::vector<TradeoffPoint> assemble(long budget, const std::vector<DeliveryOptimum>& optima) {
    std::vector<TradeoffPoint> out;
    for (long n = 1; n <= budget; ++n) {
        const auto& opt = optima[n - 1];
        for (int r = 0; r <= kTradeoffMaxRounds; ++r) {
            const long links = budget / (n * (1L << r));
            if (links < 1) break;
            if (r > 0 && opt.f_del <= 0.5) break;
            TradeoffPoint p;
            p.n_parallel = static_cast<int>(n);
            p.distill_rounds = r;
            p.n_links = links;
            p.t_del_us = opt.t_del_us;
            p.rate_mhz = 1.0 / opt.t_del_us;
            p.f_del = distilled(opt.f_del, r);
            out.push_back(p);
        }
    }
    return out;
}

void check_budget(long budget, const LinkConfig& link) {
    if (budget < 1) throw Error(ErrorKind::Domain, "transducer budget must be >= 1");
    if (budget > std::numeric_limits<int>::max())
        throw Error(ErrorKind::Domain, "transducer budget too large");
    LinkConfig c = link;
    c.policy.t_del_us = c.transducer.t_rep_us;
    require_valid(c);
}

}  // namespace

std::vector<TradeoffPoint> tradeoff_grid(long budget, const LinkConfig& link) {
    check_budget(budget, link);
    std::vector<DeliveryOptimum> optima(static_cast<std::size_t>(budget));
    // Exceptions cannot leave an OpenMP region; surface the first one after.
    std::vector<std::string> errors(static_cast<std::size_t>(budget));
    std::vector<ErrorKind> kinds(static_cast<std::size_t>(budget), ErrorKind::Config);
#pragma omp parallel for schedule(dynamic, 1)
    for (long n = 1; n <= budget; ++n) {
        try {
            optima[n - 1] = optimum_for(link, static_cast<int>(n));
        } catch (const Error& e) {
            errors[n - 1] = e.what();
            kinds[n - 1] = e.kind();
        }
    }
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty()) throw Error(kinds[i], errors[i]);
    return assemble(budget, optima);
}

std::vector<TradeoffPoint> tradeoff_grid_serial(long budget, const LinkConfig& link) {
    check_budget(budget, link);
    std::vector<DeliveryOptimum> optima;
    for (long n = 1; n <= budget; ++n) optima.push_back(optimum_for(link, static_cast<int>(n)));
    return assemble(budget, optima);
}

bool dominates(const TradeoffPoint& a, const TradeoffPoint& b) {
    const bool no_worse = a.n_links >= b.n_links && a.rate_mhz >= b.rate_mhz && a.f_del >= b.f_del;
    const bool better = a.n_links > b.n_links || a.rate_mhz > b.rate_mhz || a.f_del > b.f_del;
    return no_worse && better;
}

std::vector<TradeoffPoint> tradeoff_surface(long budget, const LinkConfig& link) {
    const auto grid = tradeoff_grid(budget, link);
    std::vector<TradeoffPoint> front;
    for (const auto& p : grid) {
        bool dominated = false;
        for (const auto& o : grid) {
            if (dominates(o, p)) { dominated = true; break; }
        }
        if (!dominated) front.push_back(p);
    }
    return front;
}

}  // namespace qlink
