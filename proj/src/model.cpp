#include "qlink/model.hpp"

#include <cmath>
#include <sstream>

#include "qlink/errors.hpp"

namespace qlink {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config: return "ConfigError";
        case ErrorKind::NotFound: return "NotFound";
        case ErrorKind::Domain: return "DomainError";
        case ErrorKind::DivisionDomain: return "DivisionDomain";
        case ErrorKind::ModelDomain: return "ModelDomain";
        case ErrorKind::NoOptimum: return "NoOptimum";
        case ErrorKind::Unattainable: return "Unattainable";
        case ErrorKind::DegenerateInput: return "DegenerateInput";
        case ErrorKind::Io: return "IoError";
    }
    return "Error";
}

namespace {

// Built-in transducer parameter sets 1 and 2.
TransducerParams make_transducer1() {
    return {"transducer1", 0.8, 0.01, 0.5, 0.1, 1.0, 0.0, std::nullopt};
}
TransducerParams make_transducer2() {
    return {"transducer2", 0.95, 0.1, 0.5, 0.01, 1.0, 0.0, std::nullopt};
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"transducer1", "transducer2", "qubit1", "qubit2"};
}

Preset preset(std::string_view name) {
    if (name == "transducer1") return make_transducer1();
    if (name == "transducer2") return make_transducer2();
    if (name == "qubit1") return StorageQubitParams::from_t1_t2(500.0, 200.0);
    if (name == "qubit2") return StorageQubitParams::from_t1_t2(1e5, 2500.0);

    std::ostringstream msg;
    msg << "unknown preset '" << name << "'; valid presets:";
    for (const auto& n : preset_names()) msg << ' ' << n;
    throw Error(ErrorKind::NotFound, msg.str());
}

TransducerParams transducer_preset(std::string_view name) {
    auto p = preset(name);
    if (auto* t = std::get_if<TransducerParams>(&p)) return *t;
    throw Error(ErrorKind::NotFound,
                "preset '" + std::string(name) + "' is not a transducer");
}

StorageQubitParams qubit_preset(std::string_view name) {
    auto p = preset(name);
    if (auto* q = std::get_if<StorageQubitParams>(&p)) return *q;
    throw Error(ErrorKind::NotFound,
                "preset '" + std::string(name) + "' is not a storage qubit");
}

const std::vector<DeviceRecord>& device_table() {
    // Demonstrated devices; eta_tot strings keep the printed bounds.
    static const std::vector<DeviceRecord> rows = {
        {"Weaver(2024)", "EMO", "3e-6", 10.0, 15.0, "6", "0.05, 1(CW)"},
        {"Jiang(2023)", "EMO", "1e-4", 5.9, 1.5, "2", ""},
        {"Brubaker(2022)", "EMO", "0.38", 5000.0, 2.2e-4, "3.2", "16"},
        {"Meesala(2024)", "EMO", "<6e-3", 20.0, 5.5, "0.14", ""},
        {"Zhao(2024)", "EMO", "<8e-3", 11.2, 8.9e-2, "0.94", "5"},
        {"Warner(2025)", "EO", "<1e-3", 1.0, 30.0, "0.12 (12)", "0.05"},
        {"Shen(2024)", "EO", "<<1e-4", 6e-5, 17000.0, "23", "1e-7"},
        {"Xie(2025)", "REI", "3.4e-5", 10000.0, 0.5, "1.24", "1e-5"},
    };
    return rows;
}

namespace {

class Checker {
public:
    explicit Checker(std::string prefix) : prefix_(std::move(prefix)) {}

    void probability(const char* field, double v) {
        if (!std::isfinite(v)) add(field, "not finite");
        else if (v < 0.0 || v > 1.0) add(field, "out of [0,1]");
    }
    void non_negative(const char* field, double v) {
        if (!std::isfinite(v)) add(field, "not finite");
        else if (v < 0.0) add(field, "must be >= 0");
    }
    void positive(const char* field, double v, bool allow_inf = false) {
        if (std::isnan(v) || (!allow_inf && std::isinf(v))) add(field, "not finite");
        else if (v <= 0.0) add(field, "must be > 0");
    }
    void add(const char* field, std::string rule) {
        out.push_back({prefix_ + field, std::move(rule)});
    }

    std::vector<Violation> out;

private:
    std::string prefix_;
};

void check_transducer(Checker& c, const TransducerParams& t) {
    c.probability("eta_mw", t.eta_mw);
    c.probability("p_mo", t.p_mo);
    c.probability("eta_det", t.eta_det);
    c.non_negative("n_th", t.n_th);
    c.positive("t_rep_us", t.t_rep_us);
    c.non_negative("bandwidth_mhz", t.bandwidth_mhz);
    if (t.eta_per_uw) c.non_negative("eta_per_uw", *t.eta_per_uw);
}

void check_qubit(Checker& c, const StorageQubitParams& q) {
    c.positive("t1_us", q.t1_us, true);
    c.positive("t2_us", q.t2_us, true);
    c.positive("t_coh_us", q.t_coh_us, true);
}

}  // namespace

std::vector<Violation> validate(const TransducerParams& t) {
    Checker c("transducer.");
    check_transducer(c, t);
    return c.out;
}

std::vector<Violation> validate(const StorageQubitParams& q) {
    Checker c("qubit.");
    check_qubit(c, q);
    return c.out;
}

std::vector<Violation> validate(const LinkConfig& config) {
    std::vector<Violation> out = validate(config.transducer);
    auto q = validate(config.qubit);
    out.insert(out.end(), q.begin(), q.end());

    Checker p("protocol.");
    const auto& proto = config.protocol;
    if (proto.needs_alpha()) {
        if (!proto.alpha) {
            p.add("alpha", "required for one-photon upconversion");
        } else if (!std::isfinite(*proto.alpha) || *proto.alpha <= 0.0 ||
                   *proto.alpha > 1.0) {
            p.add("alpha", "out of (0,1]");
        }
    } else if (proto.alpha) {
        p.add("alpha", "only allowed for one-photon upconversion");
    }
    if (proto.p_mo_override) {
        double v = *proto.p_mo_override;
        if (!std::isfinite(v) || v <= 0.0 || v > config.transducer.p_mo)
            p.add("p_mo_override", "out of (0, transducer.p_mo]");
    }
    if (proto.p_her_override) p.probability("p_her_override", *proto.p_her_override);
    out.insert(out.end(), p.out.begin(), p.out.end());

    if (config.memory) {
        Checker m("memory.");
        const auto& mem = *config.memory;
        m.probability("eta_mem", mem.eta_mem);
        m.positive("lifetime_us", mem.lifetime_us, true);
        if (mem.kind == MemoryKind::SpinCavity &&
            !(proto.basis == PhotonBasis::TwoPhoton && proto.pump == PumpMode::Upconversion))
            m.add("kind", "spin_cavity memory requires the two-photon upconversion protocol");
        if (mem.kind == MemoryKind::CatchRelease &&
            !(proto.basis == PhotonBasis::TwoPhoton && proto.pump == PumpMode::TMS))
            m.add("kind", "catch_release memory requires the two-photon TMS protocol");
        if (std::isfinite(config.policy.t_del_us) && config.policy.t_del_us > mem.lifetime_us)
            m.add("lifetime_us", "must be >= policy.t_del_us");
        out.insert(out.end(), m.out.begin(), m.out.end());
    }

    Checker d("policy.");
    const auto& pol = config.policy;
    if (!std::isfinite(pol.t_del_us)) d.add("t_del_us", "not finite");
    else if (pol.t_del_us < config.transducer.t_rep_us)
        d.add("t_del_us", "must be >= transducer.t_rep_us");
    if (pol.n_parallel < 1) d.add("n_parallel", "must be >= 1");
    if (pol.distill_rounds < 0 || pol.distill_rounds > kMaxDistillRounds)
        d.add("distill_rounds", "out of [0,10]");
    d.positive("decoherence_multiplier", pol.decoherence_multiplier);
    out.insert(out.end(), d.out.begin(), d.out.end());
    return out;
}

void require_valid(const LinkConfig& config) {
    auto v = validate(config);
    if (v.empty()) return;
    std::string msg = "invalid link config:";
    for (const auto& e : v) msg += " [" + e.message() + "]";
    throw ConfigError(msg);
}

const char* to_string(MemoryKind kind) {
    return kind == MemoryKind::SpinCavity ? "spin_cavity" : "catch_release";
}
const char* to_string(PhotonBasis basis) {
    return basis == PhotonBasis::OnePhoton ? "one_photon" : "two_photon";
}
const char* to_string(PumpMode pump) {
    return pump == PumpMode::Upconversion ? "upconversion" : "tms";
}
const char* to_string(FidelityModel model) {
    return model == FidelityModel::ThermalHalf ? "thermal_half" : "linear_sum";
}

std::string protocol_name(const ProtocolSpec& p) {
    std::string s = p.basis == PhotonBasis::OnePhoton ? "1p-" : "2p-";
    return s + (p.pump == PumpMode::Upconversion ? "upconv" : "tms");
}

void apply_protocol_name(ProtocolSpec& p, std::string_view name) {
    if (name == "1p-upconv") { p.basis = PhotonBasis::OnePhoton; p.pump = PumpMode::Upconversion; }
    else if (name == "2p-upconv") { p.basis = PhotonBasis::TwoPhoton; p.pump = PumpMode::Upconversion; }
    else if (name == "1p-tms") { p.basis = PhotonBasis::OnePhoton; p.pump = PumpMode::TMS; }
    else if (name == "2p-tms") { p.basis = PhotonBasis::TwoPhoton; p.pump = PumpMode::TMS; }
    else
        throw ConfigError("unknown protocol '" + std::string(name) +
                          "'; expected one of 1p-upconv, 2p-upconv, 1p-tms, 2p-tms");
}

}  // namespace qlink
