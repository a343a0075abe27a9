#pragma once

// Closed-form heralding probability and infidelity for the four transducer
// link protocols (one/two photon x upconversion/two-mode squeezing) and the
// two memory-boosted two-photon variants.
//
// The expressions are first order in alpha, p_mo and n_th. They are used as
// printed; the herald probability is clamped to [0,1] so absurd inputs stay
// in range.

#include "qlink/model.hpp"

namespace qlink {

enum class FormulaId {
    OnePhotonUpconversion,
    TwoPhotonUpconversion,
    OnePhotonTMS,
    TwoPhotonTMS,
    SpinCavityMemory,
    CatchReleaseMemory,
};

const char* to_string(FormulaId id);

FormulaId formula_id(const ProtocolSpec& p);

struct ProtocolAnalytics {
    double p_her = 0.0;
    double i_prot = 0.0;
    double i_th = 0.0;
    FormulaId formula_id = FormulaId::OnePhotonTMS;
};

/// Effective p_mo is the protocol override when present.
double herald_probability(const TransducerParams& t, const ProtocolSpec& p);

/// Throws ConfigError for a (protocol, memory kind) pair that has no formula.
double herald_probability_with_memory(const TransducerParams& t, const ProtocolSpec& p,
                                      const MemoryParams& m);

double protocol_infidelity(const TransducerParams& t, const ProtocolSpec& p);

/// Throws DivisionDomain when an upconversion formula divides by zero.
double thermal_infidelity(const TransducerParams& t, const ProtocolSpec& p);

/// Heralding and infidelity for a full link, memory and p_her override applied.
ProtocolAnalytics analyze_protocol(const LinkConfig& config);

/// Weight applied to the thermal infidelity by each fidelity model.
double thermal_weight(FidelityModel model);

/// ThermalHalf: 1 - i_prot - i_th/2. LinearSum: 1 - i_prot - i_th.
/// Throws ModelDomain when i_prot + weighted i_th exceeds 0.75.
double heralded_fidelity(const ProtocolAnalytics& a, FidelityModel model);

}  // namespace qlink
