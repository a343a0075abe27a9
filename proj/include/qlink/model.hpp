#pragma once

// Parameter types for a heralded optical link between two processor modules,
// plus the built-in transducer and storage-qubit presets.

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace qlink {

/// One microwave-to-optics transducer channel. Times are in microseconds.
struct TransducerParams {
    std::string name;
    double eta_mw = 0.0;   // qubit <-> transducer microwave efficiency
    double p_mo = 0.0;     // microwave <-> optical conversion/scattering probability
    double eta_det = 0.0;  // optical filtering and detection efficiency
    double n_th = 0.0;     // added thermal photons
    double t_rep_us = 1.0; // attempt period
    double bandwidth_mhz = 0.0;
    std::optional<double> eta_per_uw;  // %/uW, informational

    /// Efficiency from qubit to detector using the device's own p_mo.
    double eta_tot() const { return eta_mw * p_mo * eta_det; }

    bool operator==(const TransducerParams&) const = default;
};

struct StorageQubitParams {
    double t1_us = 1.0;
    double t2_us = 1.0;
    double t_coh_us = 1.0;  // defaults to t2_us; may be +inf

    static StorageQubitParams from_t1_t2(double t1_us, double t2_us) {
        return {t1_us, t2_us, t2_us};
    }

    bool operator==(const StorageQubitParams&) const = default;
};

enum class MemoryKind { SpinCavity, CatchRelease };

struct MemoryParams {
    MemoryKind kind = MemoryKind::SpinCavity;
    double eta_mem = 1.0;
    double lifetime_us = 1.0;

    bool operator==(const MemoryParams&) const = default;
};

enum class PhotonBasis { OnePhoton, TwoPhoton };
enum class PumpMode { Upconversion, TMS };

struct ProtocolSpec {
    PhotonBasis basis = PhotonBasis::OnePhoton;
    PumpMode pump = PumpMode::TMS;
    std::optional<double> alpha;          // only for one-photon upconversion
    std::optional<double> p_mo_override;  // deliberate reduction of p_mo
    // Pins the per-attempt herald probability to a quoted value, bypassing the
    // closed-form expressions. Infidelities still come from the formulas.
    std::optional<double> p_her_override;

    bool needs_alpha() const {
        return basis == PhotonBasis::OnePhoton && pump == PumpMode::Upconversion;
    }

    bool operator==(const ProtocolSpec&) const = default;
};

/// How protocol and thermal infidelities combine into the heralded fidelity.
enum class FidelityModel {
    ThermalHalf,  // thermal false heralds leave a fidelity-1/2 state
    LinearSum,
};

struct DeliveryPolicy {
    double t_del_us = 1.0;
    int n_parallel = 1;
    int distill_rounds = 0;
    FidelityModel fidelity_model = FidelityModel::ThermalHalf;
    // Scales the storage decay rate; 2.0 models independent decay on both sides.
    double decoherence_multiplier = 1.0;

    bool operator==(const DeliveryPolicy&) const = default;
};

inline constexpr int kMaxDistillRounds = 10;

struct LinkConfig {
    TransducerParams transducer;
    StorageQubitParams qubit;
    ProtocolSpec protocol;
    std::optional<MemoryParams> memory;
    DeliveryPolicy policy;

    /// p_mo after applying the protocol's override.
    double effective_p_mo() const {
        return protocol.p_mo_override.value_or(transducer.p_mo);
    }
    double effective_eta_tot() const {
        return transducer.eta_mw * effective_p_mo() * transducer.eta_det;
    }

    bool operator==(const LinkConfig&) const = default;
};

struct LinkMetrics {
    double p_her = 0.0;
    double i_prot = 0.0;
    double i_th = 0.0;
    double f_her = 0.0;
    double eta_link = 0.0;
    double p_success = 0.0;
    double f_del = 0.0;
};

/// Informational device row; not wired to the protocol formulas.
struct DeviceRecord {
    std::string reference;
    std::string type;
    std::string eta_tot;  // kept as printed, several rows are bounds ("<6e-3")
    double t_rep_us = 0.0;
    double bandwidth_mhz = 0.0;
    std::string n_add;
    std::string eta_per_uw;
};

using Preset = std::variant<TransducerParams, StorageQubitParams>;

/// Throws Error(NotFound) listing the valid names.
Preset preset(std::string_view name);
TransducerParams transducer_preset(std::string_view name);
StorageQubitParams qubit_preset(std::string_view name);

std::vector<std::string> preset_names();
const std::vector<DeviceRecord>& device_table();

struct Violation {
    std::string field;  // dotted path, e.g. "transducer.eta_mw"
    std::string rule;

    std::string message() const { return field + " " + rule; }
    bool operator==(const Violation&) const = default;
};

std::vector<Violation> validate(const TransducerParams& t);
std::vector<Violation> validate(const StorageQubitParams& q);
std::vector<Violation> validate(const LinkConfig& config);

/// Throws ConfigError carrying every violation if the list is non-empty.
void require_valid(const LinkConfig& config);

const char* to_string(MemoryKind kind);
const char* to_string(PhotonBasis basis);
const char* to_string(PumpMode pump);
const char* to_string(FidelityModel model);

/// Short protocol names used by the CLI: 1p-upconv, 2p-upconv, 1p-tms, 2p-tms.
std::string protocol_name(const ProtocolSpec& p);
/// Sets basis and pump from a short name; leaves the other fields untouched.
void apply_protocol_name(ProtocolSpec& p, std::string_view name);

}  // namespace qlink
