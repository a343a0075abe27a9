#include <cmath>

#include <omp.h>
#include <gtest/gtest.h>

#include "qlink/delivery.hpp"
#include "qlink/distillation.hpp"
#include "qlink/planner.hpp"
#include "test_helpers.hpp"

namespace qlink {
namespace {

using testing::example1;
using testing::example2;
using testing::example3;
using testing::expect_error_kind;

ArchitectureSpec lattice_spec() {
    ArchitectureSpec s;
    s.kind = ArchitectureKind::LatticeSurgery;
    s.qubits_per_processor = 1000;
    s.clock_cycle_us = 1.0;
    s.transducer_budget = 10000;
    s.target_fidelity = 0.85;
    return s;
}

TEST(EdgeQubits, IntegerCeilSqrt) {
    EXPECT_EQ(edge_qubit_count(1), 1);
    EXPECT_EQ(edge_qubit_count(1000), 32);
    EXPECT_EQ(edge_qubit_count(1024), 32);
    EXPECT_EQ(edge_qubit_count(1025), 33);
    EXPECT_EQ(edge_qubit_count(999999999999L), 1000000);
    expect_error_kind([] { edge_qubit_count(0); }, ErrorKind::Domain);
}

TEST(LatticeSurgery, Example3Link) {
    const auto r = lattice_surgery_plan(lattice_spec(), example3());
    EXPECT_EQ(r.links, 32);
    EXPECT_EQ(r.t_del_us, 15.0);
    EXPECT_EQ(r.transducers_per_link, 300);
    EXPECT_EQ(r.total_transducers, 9600);
    EXPECT_EQ(r.qubits_for_communication, 9600);
    EXPECT_FALSE(r.feasible);
    EXPECT_EQ(r.limiting_factor, "communication qubits exceed processor size");
    EXPECT_FALSE(r.exceeds_module_ceiling);
    EXPECT_FALSE(r.below_link_error_threshold);  // 1 - 0.896 is just above 0.1
}

TEST(LatticeSurgery, Example2LinkExceedsBudget) {
    auto spec = lattice_spec();
    const auto r = lattice_surgery_plan(spec, example2());
    EXPECT_EQ(r.transducers_per_link, 400);
    EXPECT_EQ(r.total_transducers, 12800);
    EXPECT_TRUE(r.exceeds_module_ceiling);
    EXPECT_EQ(r.limiting_factor, "communication qubits exceed processor size; transducer budget");
}

TEST(LatticeSurgery, ShortensTimeoutToMeetTarget) {
    auto spec = lattice_spec();
    spec.target_fidelity = 0.55;
    auto link = example1();
    link.policy.t_del_us = 10.0;
    const auto r = lattice_surgery_plan(spec, link);
    EXPECT_EQ(r.t_del_us, 27.0);
    EXPECT_GE(r.link_fidelity, 0.55);
    spec.target_fidelity = 0.7;
    expect_error_kind([&] { lattice_surgery_plan(spec, link); }, ErrorKind::Unattainable);
}

TEST(LatticeSurgery, DistillationMultipliesTransducers) {
    auto link = example3();
    link.policy.distill_rounds = 2;
    const auto r = lattice_surgery_plan(lattice_spec(), link);
    EXPECT_EQ(r.transducers_per_link, 1200);
    EXPECT_NEAR(r.link_fidelity, calibrated_distill(delivered_fidelity(example3()).f_del, 2), 1e-12);
}

TEST(CircuitCut, Anchors) {
    auto c = circuit_cut_comparison(0.10, 100000);
    EXPECT_EQ(c.k_classical, 10);
    ASSERT_TRUE(c.k_quantum);
    EXPECT_EQ(*c.k_quantum, 50);
    EXPECT_NEAR(c.gamma_quantum, std::pow(10.0, 0.1), 1e-12);
    EXPECT_NEAR(c.gamma_classical, std::sqrt(10.0), 1e-12);
    EXPECT_TRUE(c.advantage);

    c = circuit_cut_comparison(0.30, 100000);
    EXPECT_EQ(*c.k_quantum, c.k_classical);
    EXPECT_FALSE(c.advantage);

    c = circuit_cut_comparison(0.4, 100000);
    EXPECT_LT(*c.k_quantum, c.k_classical);
}

TEST(CircuitCut, UnboundedBelowUnitGamma) {
    const auto c = circuit_cut_comparison(0.01, 100000);
    EXPECT_FALSE(c.k_quantum.has_value());
    EXPECT_LT(c.gamma_quantum, 1.0);
    expect_error_kind([] { circuit_cut_comparison(1.0, 10); }, ErrorKind::Domain);
    expect_error_kind([] { circuit_cut_comparison(0.1, 0); }, ErrorKind::Domain);
}

TEST(SparseLinks, Example3Link) {
    auto spec = lattice_spec();
    spec.kind = ArchitectureKind::SparseLinks;
    spec.transducer_budget = 1000;
    spec.sparse_links = 10;
    const auto r = plan(spec, example3());
    EXPECT_EQ(r.links, 10);
    EXPECT_EQ(r.total_transducers, 200);
    EXPECT_TRUE(r.feasible) << r.limiting_factor;
    EXPECT_FALSE(r.notes.empty());
}

TEST(SparseLinks, NoAdvantageWhenLinksAreNoisy) {
    auto spec = lattice_spec();
    spec.kind = ArchitectureKind::SparseLinks;
    spec.target_fidelity = 0.6;
    const auto r = plan(spec, example1());
    EXPECT_FALSE(r.feasible);
    EXPECT_NE(r.limiting_factor.find("circuit cutting"), std::string::npos);
}

TEST(GraphState, PipeWidthIsCodeDistance) {
    EXPECT_EQ(graph_state_pipe_width(7), 7);
    auto spec = lattice_spec();
    spec.kind = ArchitectureKind::GraphState;
    spec.code_distance = 5;
    const auto r = plan(spec, example3());
    EXPECT_EQ(r.links, 5);
    EXPECT_EQ(r.total_transducers, 100);
}

TEST(Cryostat, Envelopes) {
    auto b = cryostat_budget_check(10, 10);
    EXPECT_EQ(b.total, 100);
    EXPECT_TRUE(b.links_in_envelope && b.per_link_in_envelope && b.total_in_envelope);
    b = cryostat_budget_check(100, 100);
    EXPECT_TRUE(b.total_in_envelope);
    b = cryostat_budget_check(101, 100);
    EXPECT_FALSE(b.links_in_envelope);
    EXPECT_FALSE(b.total_in_envelope);
    b = cryostat_budget_check(32, 300);
    EXPECT_FALSE(b.per_link_in_envelope);
    EXPECT_TRUE(b.total_in_envelope);
    expect_error_kind([] { cryostat_budget_check(0, 5); }, ErrorKind::Domain);
}

TEST(Architecture, Validation) {
    auto s = lattice_spec();
    s.target_fidelity = 1.0;
    s.clock_cycle_us = 0.0;
    EXPECT_EQ(validate(s).size(), 2u);
    EXPECT_THROW(plan(s, example3()), ConfigError);
    EXPECT_THROW(parse_architecture_kind("mesh"), ConfigError);
    EXPECT_EQ(parse_architecture_kind(to_string(ArchitectureKind::GraphState)),
              ArchitectureKind::GraphState);
}

TEST(Tradeoff, ParallelMatchesSerial) {
    omp_set_num_threads(4);
    EXPECT_EQ(tradeoff_grid(24, example3()), tradeoff_grid_serial(24, example3()));
    omp_set_num_threads(1);
}

TEST(Tradeoff, GridCellsAgreeWithDirectCurve) {
    const auto grid = tradeoff_grid(12, example1());
    for (const auto& p : grid) {
        auto c = example1();
        c.policy.n_parallel = p.n_parallel;
        const auto curve = delivery_curve_serial(delivery_model(c), search_rounds(c));
        std::size_t best = 0;
        for (std::size_t i = 1; i < curve.size(); ++i)
            if (curve.f_del[i] > curve.f_del[best] + 1e-13) best = i;
        EXPECT_EQ(p.t_del_us, curve.t_del_us[best]);
        const double raw = curve.f_del[best];
        const double want = p.distill_rounds ? calibrated_distill(raw, p.distill_rounds) : raw;
        EXPECT_NEAR(p.f_del, want, 1e-12);
        EXPECT_EQ(p.n_links, 12 / (p.n_parallel * (1L << p.distill_rounds)));
    }
}

TEST(Tradeoff, SurfaceMatchesBruteForce) {
    for (long budget : {1L, 2L, 7L, 16L, 33L, 64L}) {
        const auto grid = tradeoff_grid(budget, example3());
        std::vector<TradeoffPoint> brute;
        for (const auto& p : grid) {
            bool beaten = false;
            for (const auto& o : grid) {
                const bool ge = o.n_links >= p.n_links && o.rate_mhz >= p.rate_mhz && o.f_del >= p.f_del;
                const bool gt = o.n_links > p.n_links || o.rate_mhz > p.rate_mhz || o.f_del > p.f_del;
                beaten |= ge && gt;
            }
            if (!beaten) brute.push_back(p);
        }
        EXPECT_EQ(tradeoff_surface(budget, example3()), brute) << "budget " << budget;
        EXPECT_FALSE(brute.empty());
    }
}

TEST(Tradeoff, BudgetErrors) {
    expect_error_kind([] { tradeoff_grid(0, example3()); }, ErrorKind::Domain);
    auto c = example3();
    c.transducer.p_mo = 0.0;
    c.protocol.p_mo_override.reset();
    expect_error_kind([&] { tradeoff_grid(4, c); }, ErrorKind::NoOptimum);
}

}  // namespace
}  // namespace qlink
