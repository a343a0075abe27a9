#include "qlink/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qlink/errors.hpp"

namespace qlink {

const char* to_string(FormulaId id) {
    switch (id) {
        case FormulaId::OnePhotonUpconversion: return "1p-upconv";
        case FormulaId::TwoPhotonUpconversion: return "2p-upconv";
        case FormulaId::OnePhotonTMS: return "1p-tms";
        case FormulaId::TwoPhotonTMS: return "2p-tms";
        case FormulaId::SpinCavityMemory: return "2p-upconv+spin_cavity";
        case FormulaId::CatchReleaseMemory: return "2p-tms+catch_release";
    }
    return "unknown";
}

FormulaId formula_id(const ProtocolSpec& p) {
    if (p.basis == PhotonBasis::OnePhoton)
        return p.pump == PumpMode::Upconversion ? FormulaId::OnePhotonUpconversion
                                                : FormulaId::OnePhotonTMS;
    return p.pump == PumpMode::Upconversion ? FormulaId::TwoPhotonUpconversion
                                            : FormulaId::TwoPhotonTMS;
}

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double effective_p_mo(const TransducerParams& t, const ProtocolSpec& p) {
    return p.p_mo_override.value_or(t.p_mo);
}

double eta_tot(const TransducerParams& t, const ProtocolSpec& p) {
    return t.eta_mw * effective_p_mo(t, p) * t.eta_det;
}

double require_alpha(const ProtocolSpec& p) {
    if (!p.alpha) throw ConfigError("protocol.alpha is required for one-photon upconversion");
    return *p.alpha;
}

}  // namespace

double herald_probability(const TransducerParams& t, const ProtocolSpec& p) {
    const double et = eta_tot(t, p);
    switch (formula_id(p)) {
        case FormulaId::OnePhotonUpconversion:
            return clamp01(2.0 * require_alpha(p) * et);
        case FormulaId::OnePhotonTMS:
            // 2 eta_tot / eta_mw, written without the division.
            return clamp01(2.0 * effective_p_mo(t, p) * t.eta_det);
        default:
            return clamp01(et * et / 2.0);
    }
}

double herald_probability_with_memory(const TransducerParams& t, const ProtocolSpec& p,
                                      const MemoryParams& m) {
    const double et = eta_tot(t, p);
    const auto id = formula_id(p);
    if (m.kind == MemoryKind::SpinCavity && id == FormulaId::TwoPhotonUpconversion)
        return clamp01(et * m.eta_mem / 2.0);
    if (m.kind == MemoryKind::CatchRelease && id == FormulaId::TwoPhotonTMS)
        return clamp01(et * t.eta_mw * m.eta_mem * m.eta_mem / 2.0);
    throw ConfigError(std::string(to_string(m.kind)) + " memory is not compatible with the " +
                      to_string(id) + " protocol");
}

double protocol_infidelity(const TransducerParams& t, const ProtocolSpec& p) {
    const double p_mo = effective_p_mo(t, p);
    switch (formula_id(p)) {
        case FormulaId::OnePhotonUpconversion: return require_alpha(p);
        case FormulaId::TwoPhotonUpconversion: return 0.0;
        case FormulaId::OnePhotonTMS: return t.eta_mw * p_mo + (1.0 - t.eta_mw);
        default: return 2.0 / 3.0 * p_mo * (1.0 - t.eta_mw);
    }
}

double thermal_infidelity(const TransducerParams& t, const ProtocolSpec& p) {
    switch (formula_id(p)) {
        case FormulaId::OnePhotonUpconversion: {
            const double denom = require_alpha(p) * t.eta_mw;
            if (denom <= 0.0)
                throw Error(ErrorKind::DivisionDomain,
                            "thermal infidelity n_th/(alpha*eta_mw) needs alpha*eta_mw > 0");
            return t.n_th / denom;
        }
        case FormulaId::TwoPhotonUpconversion:
            if (t.eta_mw <= 0.0)
                throw Error(ErrorKind::DivisionDomain,
                            "thermal infidelity 6*n_th/eta_mw needs eta_mw > 0");
            return 6.0 * t.n_th / t.eta_mw;
        case FormulaId::OnePhotonTMS: return 2.0 * t.n_th * t.eta_mw * t.eta_mw;
        default: return 2.0 * t.n_th;
    }
}

ProtocolAnalytics analyze_protocol(const LinkConfig& config) {
    const auto& t = config.transducer;
    const auto& p = config.protocol;
    ProtocolAnalytics a;
    a.formula_id = formula_id(p);
    if (config.memory) {
        a.p_her = herald_probability_with_memory(t, p, *config.memory);
        a.formula_id = config.memory->kind == MemoryKind::SpinCavity
                           ? FormulaId::SpinCavityMemory
                           : FormulaId::CatchReleaseMemory;
    } else {
        a.p_her = herald_probability(t, p);
    }
    if (p.p_her_override) a.p_her = clamp01(*p.p_her_override);
    a.i_prot = protocol_infidelity(t, p);
    a.i_th = thermal_infidelity(t, p);
    return a;
}

double thermal_weight(FidelityModel model) {
    return model == FidelityModel::ThermalHalf ? 0.5 : 1.0;
}

double heralded_fidelity(const ProtocolAnalytics& a, FidelityModel model) {
    const double loss = a.i_prot + thermal_weight(model) * a.i_th;
    if (!(loss <= 0.75)) {
        std::ostringstream msg;
        msg << "infidelity sum " << loss << " exceeds 0.75; Bell-state model does not apply";
        throw Error(ErrorKind::ModelDomain, msg.str());
    }
    return std::clamp(1.0 - loss, 0.25, 1.0);
}

}  // namespace qlink
