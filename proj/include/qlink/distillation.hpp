#pragma once

// Entanglement distillation. Two models:
//  - calibrated: each four rounds (16 input pairs) cut the infidelity by 10x;
//  - recurrence: the DEJMPS two-copy step on Bell-diagonal states, with a
//    Werner twirl between rounds when nesting.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace qlink {

/// Weights over the Bell basis, ordered (Phi+, Psi-, Psi+, Phi-).
/// Component 0 is the fidelity to the target state Phi+.
struct BellDiagonalState {
    std::array<double, 4> p{1.0, 0.0, 0.0, 0.0};

    double fidelity() const { return p[0]; }
    bool is_valid(double tol = 1e-12) const;

    static BellDiagonalState werner(double fidelity);
};

struct DistillationOutcome {
    BellDiagonalState state;
    double success_probability = 1.0;  // per round (last round when nested)
    std::uint64_t pairs_consumed = 1;  // 2^rounds
    int rounds = 0;
};

enum class DistillMode { Calibrated, Recurrence };

const char* to_string(DistillMode mode);
DistillMode parse_distill_mode(const std::string& name);

/// F_out = 1 - (1 - f_in) * 10^(-rounds/4). Throws DomainError unless
/// f_in in (0.5, 1] and 0 <= rounds <= 10.
double calibrated_distill(double f_in, int rounds);

/// One recurrence step consuming pair a (kept) and pair b (measured).
/// Throws DegenerateInput when the success probability is zero.
DistillationOutcome recurrence_round(const BellDiagonalState& a, const BellDiagonalState& b);

struct NestedDistillResult {
    double f_out = 0.0;
    std::uint64_t pairs = 1;        // nominal 2^rounds
    double expected_pairs = 1.0;    // 2^rounds / prod(success probabilities)
    std::vector<double> round_fidelity;   // after each round
    std::vector<double> round_success;    // success probability of each round
};

NestedDistillResult nested_distill(double f_in, int rounds, DistillMode mode);

}  // namespace qlink
