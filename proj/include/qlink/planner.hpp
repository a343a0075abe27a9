#pragma once

// Architecture-level resource arithmetic for multi-module machines built from
// on-demand optical links: lattice surgery, sparse links with circuit cutting
// as the classical baseline, graph-state pipes, and per-cryostat budgets.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qlink/model.hpp"

namespace qlink {

enum class ArchitectureKind { LatticeSurgery, SparseLinks, GraphState };

const char* to_string(ArchitectureKind kind);
ArchitectureKind parse_architecture_kind(const std::string& name);

struct ArchitectureSpec {
    ArchitectureKind kind = ArchitectureKind::LatticeSurgery;
    long qubits_per_processor = 1000;
    double clock_cycle_us = 1.0;
    long transducer_budget = 10000;  // per cryostat
    double target_fidelity = 0.9;
    // Only read by the matching architecture.
    int code_distance = 7;            // GraphState
    long sparse_links = 10;           // SparseLinks
    std::uint64_t circuit_budget = 100000;  // SparseLinks

    bool operator==(const ArchitectureSpec&) const = default;
};

std::vector<Violation> validate(const ArchitectureSpec& spec);

/// Surface-code link error threshold for lattice surgery (annotation only).
inline constexpr double kLinkErrorThreshold = 0.1;
/// Transducer count per module reachable with dense integrated geometries.
inline constexpr long kModuleTransducerCeiling = 10000;

struct PlanReport {
    ArchitectureKind kind = ArchitectureKind::LatticeSurgery;
    long links = 0;
    long transducers_per_link = 0;
    long total_transducers = 0;
    long qubits_for_communication = 0;
    bool feasible = false;
    std::string limiting_factor;  // "none" when feasible
    // Inputs to the arithmetic, echoed for reports.
    double t_del_us = 0.0;
    double link_fidelity = 0.0;
    double speedup = 1.0;
    int n_parallel = 1;
    int distill_rounds = 0;
    bool exceeds_module_ceiling = false;
    bool below_link_error_threshold = false;
    std::vector<std::string> notes;
};

/// ceil(sqrt(n)): physical qubits along one edge of a square patch.
long edge_qubit_count(long n_qubits);

/// Uses the config's t_del when it meets the target, otherwise the shortest
/// t_del that does; Unattainable propagates.
PlanReport lattice_surgery_plan(const ArchitectureSpec& spec, const LinkConfig& link);

struct CircuitCutComparison {
    double gamma_quantum = 1.0;
    double gamma_classical = 1.0;
    std::optional<long> k_quantum;  // nullopt: gamma <= 1, no repetition overhead
    long k_classical = 0;
    bool advantage = false;
};

inline constexpr double kCircuitCutBreakEven = 0.30;

/// Calibrated model: log10(gamma) is linear in infidelity, gamma_classical =
/// 10^(1/2), gamma_quantum(0.10) = 10^(1/10), break-even at 0.30.
CircuitCutComparison circuit_cut_comparison(double infidelity, std::uint64_t circuit_budget);

int graph_state_pipe_width(int code_distance);

struct CryostatBudget {
    long links = 0;
    long transducers_per_link = 0;
    long total = 0;
    bool links_in_envelope = false;     // [10, 100]
    bool per_link_in_envelope = false;  // [10, 100]
    bool total_in_envelope = false;     // [100, 10000]
};

CryostatBudget cryostat_budget_check(long links, long transducers_per_link);

PlanReport sparse_links_plan(const ArchitectureSpec& spec, const LinkConfig& link);
PlanReport graph_state_plan(const ArchitectureSpec& spec, const LinkConfig& link);

/// Dispatches on spec.kind.
PlanReport plan(const ArchitectureSpec& spec, const LinkConfig& link);

struct TradeoffPoint {
    int n_parallel = 1;
    int distill_rounds = 0;
    long n_links = 0;
    double t_del_us = 0.0;
    double rate_mhz = 0.0;  // 1 / t_del
    double f_del = 0.0;     // after distillation (calibrated model)

    bool operator==(const TradeoffPoint&) const = default;
};

inline constexpr int kTradeoffMaxRounds = 4;

/// Every (n_parallel, distill_rounds) cell that leaves at least one link.
/// The link config's n_parallel, distill_rounds and t_del are replaced.
std::vector<TradeoffPoint> tradeoff_grid(long budget, const LinkConfig& link);
std::vector<TradeoffPoint> tradeoff_grid_serial(long budget, const LinkConfig& link);

/// a dominates b: no worse in (n_links, rate, f_del) and better in one.
bool dominates(const TradeoffPoint& a, const TradeoffPoint& b);

/// Non-dominated subset of the grid, in grid order.
std::vector<TradeoffPoint> tradeoff_surface(long budget, const LinkConfig& link);

}  // namespace qlink
