#include "qlink/io.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "qlink/errors.hpp"

namespace qlink::io {

namespace {

[[noreturn]] void schema_error(const std::string& pointer, const std::string& what) {
    throw ConfigError("schema error at " + (pointer.empty() ? std::string("root") : pointer) +
                      ": " + what);
}

// Reads one JSON object, remembering which keys were consumed so that any
// left over can be reported as unknown.
class ObjectReader {
public:
    ObjectReader(const Json& j, std::string pointer) : j_(j), ptr_(std::move(pointer)) {
        if (!j_.is_object()) schema_error(ptr_, "expected an object");
    }

    void mark(const std::string& key) { seen_.insert(key); }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    const Json& raw(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) schema_error(ptr_, "missing required key '" + key + "'");
        return j_.at(key);
    }

    double number(const std::string& key) {
        const auto& v = raw(key);
        if (!v.is_number()) schema_error(child(key), "expected a number");
        return v.get<double>();
    }

    std::optional<double> opt_number(const std::string& key) {
        seen_.insert(key);
        if (!has(key)) return std::nullopt;
        return number(key);
    }

    double number_or(const std::string& key, double fallback) {
        return opt_number(key).value_or(fallback);
    }

    // Accepts a number or the string "inf".
    double extended_number(const std::string& key) {
        const auto& v = raw(key);
        if (v.is_string() && v.get<std::string>() == "inf")
            return std::numeric_limits<double>::infinity();
        if (!v.is_number()) schema_error(child(key), "expected a number or \"inf\"");
        return v.get<double>();
    }

    long integer(const std::string& key) {
        const auto& v = raw(key);
        if (!v.is_number_integer()) schema_error(child(key), "expected an integer");
        return v.get<long>();
    }

    long integer_or(const std::string& key, long fallback) {
        seen_.insert(key);
        return has(key) ? integer(key) : fallback;
    }

    std::string string(const std::string& key) {
        const auto& v = raw(key);
        if (!v.is_string()) schema_error(child(key), "expected a string");
        return v.get<std::string>();
    }

    std::string string_or(const std::string& key, const std::string& fallback) {
        seen_.insert(key);
        return has(key) ? string(key) : fallback;
    }

    std::string child(const std::string& key) const { return ptr_ + "/" + key; }

    void finish() const {
        for (const auto& [key, _] : j_.items())
            if (!seen_.count(key)) schema_error(ptr_ + "/" + key, "unknown key '" + key + "'");
    }

private:
    const Json& j_;
    std::string ptr_;
    std::set<std::string> seen_;
};

std::optional<std::string> preset_reference(const Json& j) {
    if (!j.is_string()) return std::nullopt;
    const auto s = j.get<std::string>();
    const std::string prefix = "preset:";
    if (s.rfind(prefix, 0) != 0) return std::nullopt;
    return s.substr(prefix.size());
}

TransducerParams transducer_from_json(const Json& j, const std::string& ptr) {
    if (auto name = preset_reference(j)) return transducer_preset(*name);
    if (j.is_string()) schema_error(ptr, "expected an object or \"preset:<name>\"");
    ObjectReader r(j, ptr);
    TransducerParams t;
    t.name = r.string_or("name", "custom");
    t.eta_mw = r.number("eta_mw");
    t.p_mo = r.number("p_mo");
    t.eta_det = r.number("eta_det");
    t.n_th = r.number("n_th");
    t.t_rep_us = r.number("t_rep_us");
    t.bandwidth_mhz = r.number_or("bandwidth_mhz", 0.0);
    t.eta_per_uw = r.opt_number("eta_per_uw");
    r.finish();
    return t;
}

StorageQubitParams qubit_from_json(const Json& j, const std::string& ptr) {
    if (auto name = preset_reference(j)) return qubit_preset(*name);
    if (j.is_string()) schema_error(ptr, "expected an object or \"preset:<name>\"");
    ObjectReader r(j, ptr);
    StorageQubitParams q;
    q.t1_us = r.extended_number("t1_us");
    q.t2_us = r.extended_number("t2_us");
    r.mark("t_coh_us");
    q.t_coh_us = r.has("t_coh_us") ? r.extended_number("t_coh_us") : q.t2_us;
    r.finish();
    return q;
}

ProtocolSpec protocol_from_json(const Json& j, const std::string& ptr) {
    ObjectReader r(j, ptr);
    ProtocolSpec p;
    const auto basis = r.string("basis");
    if (basis == "one_photon") p.basis = PhotonBasis::OnePhoton;
    else if (basis == "two_photon") p.basis = PhotonBasis::TwoPhoton;
    else schema_error(r.child("basis"), "expected \"one_photon\" or \"two_photon\"");
    const auto pump = r.string("pump");
    if (pump == "upconversion") p.pump = PumpMode::Upconversion;
    else if (pump == "tms") p.pump = PumpMode::TMS;
    else schema_error(r.child("pump"), "expected \"upconversion\" or \"tms\"");
    p.alpha = r.opt_number("alpha");
    p.p_mo_override = r.opt_number("p_mo_override");
    p.p_her_override = r.opt_number("p_her_override");
    r.finish();
    return p;
}

MemoryParams memory_from_json(const Json& j, const std::string& ptr) {
    ObjectReader r(j, ptr);
    MemoryParams m;
    const auto kind = r.string("kind");
    if (kind == "spin_cavity") m.kind = MemoryKind::SpinCavity;
    else if (kind == "catch_release") m.kind = MemoryKind::CatchRelease;
    else schema_error(r.child("kind"), "expected \"spin_cavity\" or \"catch_release\"");
    m.eta_mem = r.number("eta_mem");
    m.lifetime_us = r.extended_number("lifetime_us");
    r.finish();
    return m;
}

FidelityModel parse_fidelity_model(const std::string& s, const std::string& ptr) {
    if (s == "thermal_half") return FidelityModel::ThermalHalf;
    if (s == "linear_sum") return FidelityModel::LinearSum;
    schema_error(ptr, "expected \"thermal_half\" or \"linear_sum\"");
}

DeliveryPolicy policy_from_json(const Json& j, const std::string& ptr) {
    ObjectReader r(j, ptr);
    DeliveryPolicy p;
    p.t_del_us = r.number("t_del_us");
    p.n_parallel = static_cast<int>(r.integer_or("n_parallel", 1));
    p.distill_rounds = static_cast<int>(r.integer_or("distill_rounds", 0));
    p.fidelity_model =
        parse_fidelity_model(r.string_or("fidelity_model", "thermal_half"), r.child("fidelity_model"));
    p.decoherence_multiplier = r.number_or("decoherence_multiplier", 1.0);
    r.finish();
    return p;
}

void throw_violations(const std::vector<Violation>& v) {
    if (v.empty()) return;
    std::string msg = "invariant violation:";
    for (const auto& e : v) msg += " [" + e.message() + "]";
    throw ConfigError(msg);
}

const std::set<std::string> kLinkKeys = {"transducer", "qubit", "protocol", "memory", "policy"};

LinkConfig link_from_root(const Json& j) {
    LinkConfig c;
    for (const char* key : {"transducer", "qubit", "protocol", "policy"})
        if (!j.contains(key)) schema_error("", std::string("missing required key '") + key + "'");
    c.transducer = transducer_from_json(j.at("transducer"), "/transducer");
    c.qubit = qubit_from_json(j.at("qubit"), "/qubit");
    c.protocol = protocol_from_json(j.at("protocol"), "/protocol");
    if (j.contains("memory") && !j.at("memory").is_null())
        c.memory = memory_from_json(j.at("memory"), "/memory");
    c.policy = policy_from_json(j.at("policy"), "/policy");
    return c;
}

Json number_or_inf(double v) {
    if (std::isinf(v)) return "inf";
    return v;
}

}  // namespace

LinkConfig link_config_from_json(const Json& j) {
    if (!j.is_object()) schema_error("", "expected an object");
    for (const auto& [key, _] : j.items())
        if (!kLinkKeys.count(key)) schema_error("/" + key, "unknown key '" + key + "'");
    auto c = link_from_root(j);
    throw_violations(validate(c));
    return c;
}

ArchitectureSpec architecture_from_json(const Json& j, const std::string& ptr) {
    ObjectReader r(j, ptr);
    ArchitectureSpec s;
    s.kind = parse_architecture_kind(r.string("kind"));
    s.qubits_per_processor = r.integer("qubits_per_processor");
    s.clock_cycle_us = r.number("clock_cycle_us");
    s.transducer_budget = r.integer("transducer_budget");
    s.target_fidelity = r.number("target_fidelity");
    s.code_distance = static_cast<int>(r.integer_or("code_distance", s.code_distance));
    s.sparse_links = r.integer_or("sparse_links", s.sparse_links);
    const long budget = r.integer_or("circuit_budget", static_cast<long>(s.circuit_budget));
    if (budget < 1) schema_error(r.child("circuit_budget"), "must be >= 1");
    s.circuit_budget = static_cast<std::uint64_t>(budget);
    r.finish();
    throw_violations(validate(s));
    return s;
}

ParsedConfig parse_config_text(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        schema_error("", std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) schema_error("", "expected an object");

    ParsedConfig out;
    if (j.contains("architecture")) {
        for (const auto& [key, _] : j.items())
            if (key != "architecture" && !kLinkKeys.count(key))
                schema_error("/" + key, "unknown key '" + key + "'");
        out.architecture = architecture_from_json(j.at("architecture"), "/architecture");
        Json link = j;
        link.erase("architecture");
        if (!link.empty()) out.link = link_config_from_json(link);
        return out;
    }
    out.link = link_config_from_json(j);
    return out;
}

ParsedConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

Json to_json(const TransducerParams& t) {
    Json j;
    j["name"] = t.name;
    j["eta_mw"] = t.eta_mw;
    j["p_mo"] = t.p_mo;
    j["eta_det"] = t.eta_det;
    j["n_th"] = t.n_th;
    j["t_rep_us"] = t.t_rep_us;
    j["bandwidth_mhz"] = t.bandwidth_mhz;
    if (t.eta_per_uw) j["eta_per_uw"] = *t.eta_per_uw;
    return j;
}

Json to_json(const StorageQubitParams& q) {
    Json j;
    j["t1_us"] = number_or_inf(q.t1_us);
    j["t2_us"] = number_or_inf(q.t2_us);
    j["t_coh_us"] = number_or_inf(q.t_coh_us);
    return j;
}

Json to_json(const ProtocolSpec& p) {
    Json j;
    j["basis"] = to_string(p.basis);
    j["pump"] = to_string(p.pump);
    if (p.alpha) j["alpha"] = *p.alpha;
    if (p.p_mo_override) j["p_mo_override"] = *p.p_mo_override;
    if (p.p_her_override) j["p_her_override"] = *p.p_her_override;
    return j;
}

Json to_json(const MemoryParams& m) {
    Json j;
    j["kind"] = to_string(m.kind);
    j["eta_mem"] = m.eta_mem;
    j["lifetime_us"] = number_or_inf(m.lifetime_us);
    return j;
}

Json to_json(const DeliveryPolicy& p) {
    Json j;
    j["t_del_us"] = p.t_del_us;
    j["n_parallel"] = p.n_parallel;
    j["distill_rounds"] = p.distill_rounds;
    j["fidelity_model"] = to_string(p.fidelity_model);
    j["decoherence_multiplier"] = p.decoherence_multiplier;
    return j;
}

Json to_json(const LinkConfig& c) {
    Json j;
    j["transducer"] = to_json(c.transducer);
    j["qubit"] = to_json(c.qubit);
    j["protocol"] = to_json(c.protocol);
    if (c.memory) j["memory"] = to_json(*c.memory);
    j["policy"] = to_json(c.policy);
    return j;
}

Json to_json(const ArchitectureSpec& s) {
    Json j;
    j["kind"] = to_string(s.kind);
    j["qubits_per_processor"] = s.qubits_per_processor;
    j["clock_cycle_us"] = s.clock_cycle_us;
    j["transducer_budget"] = s.transducer_budget;
    j["target_fidelity"] = s.target_fidelity;
    j["code_distance"] = s.code_distance;
    j["sparse_links"] = s.sparse_links;
    j["circuit_budget"] = s.circuit_budget;
    return j;
}

Json to_json(const ParsedConfig& c) {
    Json j = c.link ? to_json(*c.link) : Json::object();
    if (c.architecture) j["architecture"] = to_json(*c.architecture);
    return j;
}

double round9(double v) {
    if (!std::isfinite(v) || v == 0.0) return v;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return std::strtod(buf, nullptr);
}

std::string format9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

namespace {

Json r9(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return nullptr;
    return round9(v);
}

}  // namespace

Json to_json(const LinkMetrics& m) {
    Json j;
    j["p_her"] = r9(m.p_her);
    j["i_prot"] = r9(m.i_prot);
    j["i_th"] = r9(m.i_th);
    j["f_her"] = r9(m.f_her);
    j["eta_link"] = r9(m.eta_link);
    j["p_success"] = r9(m.p_success);
    j["f_del"] = r9(m.f_del);
    return j;
}

Json to_json(const ProtocolAnalytics& a) {
    Json j;
    j["formula_id"] = to_string(a.formula_id);
    j["p_her"] = r9(a.p_her);
    j["i_prot"] = r9(a.i_prot);
    j["i_th"] = r9(a.i_th);
    return j;
}

Json to_json(const DeliveryOptimum& o) {
    Json j;
    j["rounds"] = o.rounds;
    j["t_del_us"] = r9(o.t_del_us);
    j["f_del"] = r9(o.f_del);
    j["p_success"] = r9(o.p_success);
    return j;
}

Json to_json(const MCStats& s) {
    Json j;
    j["n_trials"] = s.n_trials;
    j["seed"] = s.seed;
    j["rounds"] = s.rounds;
    j["t_del_us"] = r9(s.t_del_us);
    j["mean_f_del"] = r9(s.mean_f_del);
    j["std_error"] = r9(s.std_error);
    j["p_success"] = r9(s.p_success);
    j["failures"] = s.failures;
    j["herald_histogram"] = s.herald_histogram;
    return j;
}

Json to_json(const DistillMCStats& s) {
    Json j;
    j["n_trials"] = s.n_trials;
    j["seed"] = s.seed;
    j["rounds"] = s.rounds;
    j["f_out"] = r9(s.f_out);
    j["mean_pairs"] = r9(s.mean_pairs);
    j["pairs_std_error"] = r9(s.pairs_std_error);
    j["expected_pairs"] = r9(s.expected_pairs);
    Json rounds = Json::array();
    for (int k = 0; k < s.rounds; ++k) {
        Json r;
        r["round"] = k + 1;
        r["attempts"] = s.attempts[k];
        r["successes"] = s.successes[k];
        r["empirical_success_rate"] = r9(s.empirical_success_rate(k));
        r["success_probability"] = r9(s.success_probability[k]);
        rounds.push_back(r);
    }
    j["per_round"] = rounds;
    return j;
}

Json to_json(const DistillationOutcome& o) {
    Json j;
    Json state = Json::array();
    for (double v : o.state.p) state.push_back(r9(v));
    j["state"] = state;
    j["fidelity"] = r9(o.state.fidelity());
    j["success_probability"] = r9(o.success_probability);
    j["pairs_consumed"] = o.pairs_consumed;
    j["rounds"] = o.rounds;
    return j;
}

Json to_json(const NestedDistillResult& r) {
    Json j;
    j["f_out"] = r9(r.f_out);
    j["pairs"] = r.pairs;
    j["expected_pairs"] = r9(r.expected_pairs);
    Json f = Json::array(), p = Json::array();
    for (double v : r.round_fidelity) f.push_back(r9(v));
    for (double v : r.round_success) p.push_back(r9(v));
    j["round_fidelity"] = f;
    j["round_success"] = p;
    return j;
}

Json to_json(const PlanReport& r) {
    Json j;
    j["architecture"] = to_string(r.kind);
    j["links"] = r.links;
    j["transducers_per_link"] = r.transducers_per_link;
    j["total_transducers"] = r.total_transducers;
    j["qubits_for_communication"] = r.qubits_for_communication;
    j["feasible"] = r.feasible;
    j["limiting_factor"] = r.limiting_factor;
    j["t_del_us"] = r9(r.t_del_us);
    j["link_fidelity"] = r9(r.link_fidelity);
    j["speedup"] = r9(r.speedup);
    j["n_parallel"] = r.n_parallel;
    j["distill_rounds"] = r.distill_rounds;
    j["exceeds_module_ceiling"] = r.exceeds_module_ceiling;
    j["below_link_error_threshold"] = r.below_link_error_threshold;
    j["notes"] = r.notes;
    return j;
}

Json to_json(const CircuitCutComparison& c) {
    Json j;
    j["gamma_quantum"] = r9(c.gamma_quantum);
    j["gamma_classical"] = r9(c.gamma_classical);
    if (c.k_quantum) j["k_quantum"] = *c.k_quantum;
    else j["k_quantum"] = "unbounded";
    j["k_classical"] = c.k_classical;
    j["advantage"] = c.advantage;
    j["model"] = "calibrated";
    return j;
}

Json to_json(const CryostatBudget& b) {
    Json j;
    j["links"] = b.links;
    j["transducers_per_link"] = b.transducers_per_link;
    j["total"] = b.total;
    j["links_in_envelope"] = b.links_in_envelope;
    j["per_link_in_envelope"] = b.per_link_in_envelope;
    j["total_in_envelope"] = b.total_in_envelope;
    return j;
}

Json to_json(const TradeoffPoint& p) {
    Json j;
    j["n_parallel"] = p.n_parallel;
    j["distill_rounds"] = p.distill_rounds;
    j["n_links"] = p.n_links;
    j["t_del_us"] = r9(p.t_del_us);
    j["rate_mhz"] = r9(p.rate_mhz);
    j["f_del"] = r9(p.f_del);
    return j;
}

std::string delivery_curve_csv(const DeliveryCurve& c) {
    std::string out = "t_del_us,p_success,f_del\n";
    for (std::size_t i = 0; i < c.size(); ++i)
        out += format9(c.t_del_us[i]) + "," + format9(c.p_success[i]) + "," + format9(c.f_del[i]) +
               "\n";
    return out;
}

std::string tradeoff_csv(const std::vector<TradeoffPoint>& points) {
    std::string out = "n_parallel,distill_rounds,n_links,t_del_us,rate_mhz,f_del\n";
    for (const auto& p : points)
        out += std::to_string(p.n_parallel) + "," + std::to_string(p.distill_rounds) + "," +
               std::to_string(p.n_links) + "," + format9(p.t_del_us) + "," + format9(p.rate_mhz) +
               "," + format9(p.f_del) + "\n";
    return out;
}

std::string trial_records_csv(const std::vector<TrialRecord>& records) {
    std::string out = "trial,herald_round,channel,tau_us,f_del\n";
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        out += std::to_string(i) + "," + (r.herald_round ? std::to_string(*r.herald_round) : "") +
               "," + (r.channel ? std::to_string(*r.channel) : "") + "," + format9(r.tau_us) + "," +
               format9(r.f_del) + "\n";
    }
    return out;
}

std::string metrics_csv(const LinkMetrics& m) {
    return "p_her,i_prot,i_th,f_her,eta_link,p_success,f_del\n" + format9(m.p_her) + "," +
           format9(m.i_prot) + "," + format9(m.i_th) + "," + format9(m.f_her) + "," +
           format9(m.eta_link) + "," + format9(m.p_success) + "," + format9(m.f_del) + "\n";
}

InfidelityBreakdown infidelity_breakdown(const LinkConfig& config, const LinkMetrics& m) {
    InfidelityBreakdown b;
    b.protocol = m.i_prot;
    b.thermal = thermal_weight(config.policy.fidelity_model) * m.i_th;
    b.total_heralded = 1.0 - m.f_her;
    b.total_delivered = 1.0 - m.f_del;
    b.storage_and_fallback = m.f_her - m.f_del;
    return b;
}

std::string breakdown_csv(const InfidelityBreakdown& b) {
    std::string out = "component,probabilistic,on_demand\n";
    out += "protocol," + format9(b.protocol) + "," + format9(b.protocol) + "\n";
    out += "thermal," + format9(b.thermal) + "," + format9(b.thermal) + "\n";
    out += "storage_and_fallback,0," + format9(b.storage_and_fallback) + "\n";
    out += "total," + format9(b.total_heralded) + "," + format9(b.total_delivered) + "\n";
    return out;
}

Json to_json(const InfidelityBreakdown& b) {
    Json j;
    j["protocol"] = r9(b.protocol);
    j["thermal"] = r9(b.thermal);
    j["storage_and_fallback"] = r9(b.storage_and_fallback);
    j["total_heralded"] = r9(b.total_heralded);
    j["total_delivered"] = r9(b.total_delivered);
    return j;
}

Json to_json(const RunManifest& m) {
    Json j;
    j["tool"] = "qlink";
    j["tool_version"] = m.tool_version;
    j["command"] = m.command;
    j["config"] = m.config;
    if (m.seed) j["seed"] = *m.seed;
    else j["seed"] = nullptr;
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    return j;
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_artifact(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw Error(ErrorKind::Io, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorKind::Io, "cannot rename into " + path.string());
    }
}

}  // namespace qlink::io
