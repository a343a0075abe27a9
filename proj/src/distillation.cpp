#include "qlink/distillation.hpp"

#include <cmath>

#include "qlink/errors.hpp"
#include "qlink/model.hpp"

namespace qlink {

bool BellDiagonalState::is_valid(double tol) const {
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= -tol)) return false;
        sum += v;
    }
    return std::abs(sum - 1.0) <= tol;
}

BellDiagonalState BellDiagonalState::werner(double fidelity) {
    const double rest = (1.0 - fidelity) / 3.0;
    return {{fidelity, rest, rest, rest}};
}

const char* to_string(DistillMode mode) {
    return mode == DistillMode::Calibrated ? "calibrated" : "recurrence";
}

DistillMode parse_distill_mode(const std::string& name) {
    if (name == "calibrated") return DistillMode::Calibrated;
    if (name == "recurrence") return DistillMode::Recurrence;
    throw ConfigError("unknown distillation mode '" + name +
                      "'; expected calibrated or recurrence");
}

namespace {

void check_inputs(double f_in, int rounds) {
    if (!(f_in > 0.5 && f_in <= 1.0))
        throw Error(ErrorKind::Domain, "input fidelity must lie in (0.5, 1]");
    if (rounds < 0 || rounds > kMaxDistillRounds)
        throw Error(ErrorKind::Domain, "distillation rounds must lie in [0, 10]");
}

}  // namespace

double calibrated_distill(double f_in, int rounds) {
    check_inputs(f_in, rounds);
    return 1.0 - (1.0 - f_in) * std::pow(10.0, -rounds / 4.0);
}

DistillationOutcome recurrence_round(const BellDiagonalState& a, const BellDiagonalState& b) {
    if (!a.is_valid(1e-9) || !b.is_valid(1e-9))
        throw Error(ErrorKind::Domain, "Bell-diagonal weights must be >= 0 and sum to 1");
    const auto& [a1, b1, c1, d1] = a.p;
    const auto& [a2, b2, c2, d2] = b.p;
    // Post-selection on even parity of the measured pair; derived from the
    // bilateral-rotation + bilateral-CNOT circuit on the 16x16 density matrix.
    const double norm = (a1 + b1) * (a2 + b2) + (c1 + d1) * (c2 + d2);
    if (!(norm > 0.0))
        throw Error(ErrorKind::DegenerateInput, "recurrence success probability is zero");

    DistillationOutcome out;
    out.state.p = {(a1 * a2 + b1 * b2) / norm, (c1 * d2 + d1 * c2) / norm,
                   (c1 * c2 + d1 * d2) / norm, (a1 * b2 + b1 * a2) / norm};
    out.success_probability = norm;
    out.pairs_consumed = 2;
    out.rounds = 1;
    return out;
}

NestedDistillResult nested_distill(double f_in, int rounds, DistillMode mode) {
    check_inputs(f_in, rounds);
    NestedDistillResult r;
    r.pairs = std::uint64_t{1} << rounds;
    if (mode == DistillMode::Calibrated) {
        for (int k = 1; k <= rounds; ++k) {
            r.round_fidelity.push_back(calibrated_distill(f_in, k));
            r.round_success.push_back(1.0);
        }
        r.f_out = calibrated_distill(f_in, rounds);
        r.expected_pairs = static_cast<double>(r.pairs);
        return r;
    }

    double f = f_in;
    double expected = 1.0;
    for (int k = 0; k < rounds; ++k) {
        const auto twirled = BellDiagonalState::werner(f);
        const auto step = recurrence_round(twirled, twirled);
        f = step.state.fidelity();
        expected = 2.0 * expected / step.success_probability;
        r.round_fidelity.push_back(f);
        r.round_success.push_back(step.success_probability);
    }
    r.f_out = f;
    r.expected_pairs = expected;
    return r;
}

}  // namespace qlink
