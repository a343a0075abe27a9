#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <optional>
#include <ostream>

#include "CLI11.hpp"
#include "qlink/delivery.hpp"
#include "qlink/distillation.hpp"
#include "qlink/errors.hpp"
#include "qlink/io.hpp"
#include "qlink/mc_sim.hpp"
#include "qlink/planner.hpp"
#include "qlink/protocol.hpp"

namespace qlink::cli {

namespace {

using io::Json;
namespace fs = std::filesystem;

struct Options {
    std::string config;
    std::string out_dir = ".";
    std::string format;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    std::optional<double> t_del;
    std::optional<std::string> protocol;
    std::optional<std::string> fidelity_model;
    std::string mode = "calibrated";
    long budget = 16;
    std::optional<double> fidelity;
    std::optional<int> rounds;
    bool dump_trials = false;
};

struct Artifact {
    std::string name;
    std::string content;
};

class Command {
public:
    Command(std::string name, const Options& opt) : name_(std::move(name)), opt_(opt) {
        manifest_.command = name_;
        manifest_.started_at = io::utc_timestamp();
    }

    io::ParsedConfig load() const {
        if (opt_.config.empty()) throw ConfigError("--config is required for " + name_);
        auto parsed = io::parse_config(opt_.config);
        if (parsed.link) {
            auto& link = *parsed.link;
            if (opt_.t_del) link.policy.t_del_us = *opt_.t_del;
            if (opt_.protocol) apply_protocol_name(link.protocol, *opt_.protocol);
            if (opt_.fidelity_model) {
                if (*opt_.fidelity_model == "thermal-half")
                    link.policy.fidelity_model = FidelityModel::ThermalHalf;
                else if (*opt_.fidelity_model == "linear")
                    link.policy.fidelity_model = FidelityModel::LinearSum;
                else
                    throw ConfigError("--fidelity-model must be thermal-half or linear");
            }
            require_valid(link);
        }
        return parsed;
    }

    LinkConfig load_link() const {
        auto parsed = load();
        if (!parsed.link) throw ConfigError(name_ + " needs a link configuration");
        return *parsed.link;
    }

    void set_config(const Json& resolved) { manifest_.config = resolved; }
    void set_seed(std::uint64_t seed) { manifest_.seed = seed; }

    Json manifest() {
        manifest_.finished_at = io::utc_timestamp();
        return io::to_json(manifest_);
    }

    std::string format(const char* fallback) const {
        const auto f = opt_.format.empty() ? std::string(fallback) : opt_.format;
        if (f != "json" && f != "csv") throw ConfigError("--format must be json or csv");
        return f;
    }

    // All artifacts are computed before the first one is written.
    void write(const std::vector<Artifact>& artifacts) const {
        std::error_code ec;
        fs::create_directories(opt_.out_dir, ec);
        if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + opt_.out_dir);
        for (const auto& a : artifacts) io::write_artifact(fs::path(opt_.out_dir) / a.name, a.content);
    }

private:
    std::string name_;
    const Options& opt_;
    io::RunManifest manifest_;
};

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

int run_analyze(const Options& opt, std::ostream& out) {
    Command cmd("analyze", opt);
    const auto link = cmd.load_link();
    cmd.set_config(io::to_json(link));

    const auto analytics = analyze_protocol(link);
    const auto metrics = delivered_fidelity(link);

    Json doc;
    doc["manifest"] = nullptr;
    doc["metrics"] = io::to_json(metrics);

    Json formula = io::to_json(analytics);
    std::vector<std::string> warnings;
    if (link.protocol.p_her_override) {
        LinkConfig plain = link;
        plain.protocol.p_her_override.reset();
        const double closed_form = analyze_protocol(plain).p_her;
        const double pinned = *link.protocol.p_her_override;
        formula["p_her_formula"] = io::round9(closed_form);
        formula["p_her_override"] = io::round9(pinned);
        if (closed_form != pinned) {
            const double gap = pinned > 0.0 ? std::abs(pinned - closed_form) / pinned : 0.0;
            formula["p_her_relative_gap"] = io::round9(gap);
            warnings.push_back("p_her pinned to " + io::format9(pinned) +
                               " differs from the closed-form value " + io::format9(closed_form) +
                               " (relative gap " + io::format9(gap) + ")");
        }
    }
    doc["analytics"] = formula;

    try {
        doc["optimum"] = io::to_json(optimal_delivery_time(link));
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NoOptimum) throw;
        doc["optimum"] = nullptr;
    }

    const int rounds = link.policy.distill_rounds;
    if (rounds > 0 && metrics.f_del > 0.5) {
        const auto mode = parse_distill_mode(opt.mode);
        Json d = io::to_json(nested_distill(metrics.f_del, rounds, mode));
        d["mode"] = to_string(mode);
        d["transducers_per_link"] =
            static_cast<long>(link.policy.n_parallel) * (1L << rounds);
        doc["distilled"] = d;
    } else {
        doc["distilled"] = nullptr;
    }

    const auto breakdown = io::infidelity_breakdown(link, metrics);
    doc["breakdown"] = io::to_json(breakdown);
    doc["link_error_threshold"] = kLinkErrorThreshold;
    doc["warnings"] = warnings;

    const auto model = delivery_model(link);
    const long k = static_cast<long>(std::floor(link.policy.t_del_us / model.t_rep_us + 1e-9));
    const auto curve = delivery_curve(model, 2 * k);

    doc["manifest"] = cmd.manifest();
    std::vector<Artifact> artifacts;
    if (cmd.format("json") == "json") artifacts.push_back({"analyze.json", dump(doc)});
    else artifacts.push_back({"metrics.csv", io::metrics_csv(metrics)});
    artifacts.push_back({"delivery_curve.csv", io::delivery_curve_csv(curve)});
    artifacts.push_back({"breakdown.csv", io::breakdown_csv(breakdown)});
    cmd.write(artifacts);
    out << dump(doc);
    return 0;
}

int run_simulate(const Options& opt, std::ostream& out) {
    Command cmd("simulate", opt);
    const auto link = cmd.load_link();
    cmd.set_config(io::to_json(link));
    cmd.set_seed(opt.seed);

    const auto stats = run_trials(link, opt.trials, opt.seed);
    const auto metrics = delivered_fidelity(link);

    Json doc;
    doc["manifest"] = nullptr;
    doc["mc"] = io::to_json(stats);
    Json analytic;
    analytic["f_del"] = io::round9(metrics.f_del);
    analytic["p_success"] = io::round9(metrics.p_success);
    doc["analytic"] = analytic;
    Json z;
    z["f_del"] = stats.std_error > 0.0
                     ? Json(io::round9((stats.mean_f_del - metrics.f_del) / stats.std_error))
                     : Json(nullptr);
    const double p = metrics.p_success;
    const double se_p = std::sqrt(p * (1.0 - p) / static_cast<double>(stats.n_trials));
    z["p_success"] = se_p > 0.0 ? Json(io::round9((stats.p_success - p) / se_p)) : Json(nullptr);
    doc["z_scores"] = z;

    std::vector<Artifact> artifacts;
    if (opt.dump_trials) {
        const auto model = delivery_model(link);
        artifacts.push_back(
            {"trials.csv",
             io::trial_records_csv(record_trials(model, stats.rounds, opt.trials, opt.seed))});
    }
    doc["manifest"] = cmd.manifest();
    artifacts.insert(artifacts.begin(), {"simulate.json", dump(doc)});
    cmd.write(artifacts);
    out << dump(doc);
    return 0;
}

int run_plan(const Options& opt, std::ostream& out) {
    Command cmd("plan", opt);
    const auto parsed = cmd.load();
    if (!parsed.architecture) throw ConfigError("plan needs an 'architecture' object");
    if (!parsed.link) throw ConfigError("plan needs a link configuration next to 'architecture'");
    cmd.set_config(io::to_json(parsed));

    const auto report = plan(*parsed.architecture, *parsed.link);
    Json doc;
    doc["manifest"] = nullptr;
    doc["plan"] = io::to_json(report);
    doc["cryostat"] = io::to_json(cryostat_budget_check(report.links, report.transducers_per_link));
    if (parsed.architecture->kind == ArchitectureKind::SparseLinks)
        doc["circuit_cut"] = io::to_json(circuit_cut_comparison(
            std::max(0.0, 1.0 - report.link_fidelity), parsed.architecture->circuit_budget));
    doc["manifest"] = cmd.manifest();
    cmd.write({{"plan.json", dump(doc)}});
    out << dump(doc);
    return 0;
}

int run_tradeoff(const Options& opt, std::ostream& out) {
    Command cmd("tradeoff", opt);
    const auto link = cmd.load_link();
    cmd.set_config(io::to_json(link));

    const auto points = tradeoff_surface(opt.budget, link);
    const auto csv = io::tradeoff_csv(points);
    std::vector<Artifact> artifacts{{"tradeoff.csv", csv}};
    if (cmd.format("csv") == "json") {
        Json doc;
        doc["budget"] = opt.budget;
        Json pts = Json::array();
        for (const auto& p : points) pts.push_back(io::to_json(p));
        doc["points"] = pts;
        doc["manifest"] = cmd.manifest();
        artifacts.push_back({"tradeoff.json", dump(doc)});
    }
    cmd.write(artifacts);
    out << csv;
    return 0;
}

int run_distill(const Options& opt, std::ostream& out) {
    Command cmd("distill", opt);
    const auto mode = parse_distill_mode(opt.mode);
    double f_in = 0.0;
    int rounds = 0;
    Json resolved;
    if (!opt.config.empty()) {
        const auto link = cmd.load_link();
        f_in = delivered_fidelity(link).f_del;
        rounds = link.policy.distill_rounds;
        resolved = io::to_json(link);
    }
    if (opt.fidelity) f_in = *opt.fidelity;
    if (opt.rounds) rounds = *opt.rounds;
    if (opt.config.empty() && !opt.fidelity)
        throw ConfigError("distill needs --config or --fidelity");
    resolved["distill"] = Json{{"f_in", f_in}, {"rounds", rounds}, {"mode", to_string(mode)}};
    cmd.set_config(resolved);

    const auto nested = nested_distill(f_in, rounds, mode);
    DistillationOutcome outcome;
    outcome.rounds = rounds;
    outcome.pairs_consumed = nested.pairs;
    if (mode == DistillMode::Recurrence && rounds > 0) {
        const auto twirled = BellDiagonalState::werner(rounds == 1 ? f_in : nested.round_fidelity[rounds - 2]);
        const auto last = recurrence_round(twirled, twirled);
        outcome.state = last.state;
        outcome.success_probability = last.success_probability;
    } else {
        outcome.state = BellDiagonalState::werner(nested.f_out);
        outcome.success_probability = 1.0;
    }

    Json doc;
    doc["manifest"] = nullptr;
    doc["mode"] = to_string(mode);
    doc["f_in"] = io::round9(f_in);
    doc["outcome"] = io::to_json(outcome);
    doc["nested"] = io::to_json(nested);
    doc["manifest"] = cmd.manifest();
    cmd.write({{"distill.json", dump(doc)}});
    out << dump(doc);
    return 0;
}

int run_presets(std::ostream& out) {
    Json doc;
    Json transducers, qubits;
    for (const auto& name : preset_names()) {
        auto p = preset(name);
        if (auto* t = std::get_if<TransducerParams>(&p)) {
            Json j = io::to_json(*t);
            j["eta_tot"] = io::round9(t->eta_tot());
            transducers[name] = j;
        } else {
            qubits[name] = io::to_json(std::get<StorageQubitParams>(p));
        }
    }
    doc["transducers"] = transducers;
    doc["qubits"] = qubits;
    Json devices = Json::array();
    for (const auto& d : device_table()) {
        devices.push_back(Json{{"reference", d.reference},
                               {"type", d.type},
                               {"eta_tot", d.eta_tot},
                               {"t_rep_us", d.t_rep_us},
                               {"bandwidth_mhz", d.bandwidth_mhz},
                               {"n_add", d.n_add},
                               {"eta_per_uw", d.eta_per_uw}});
    }
    doc["devices"] = devices;
    out << dump(doc);
    return 0;
}

void print_error(std::ostream& err, const std::string& kind, const std::string& message) {
    err << Json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int run_command(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    Options opt;
    CLI::App app{"Heralded optical link analytics, Monte Carlo and architecture planning", "qlink"};
    app.require_subcommand(1);

    auto add_link_options = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config, "JSON configuration file");
        sub->add_option("--out", opt.out_dir, "Directory for output artifacts");
        sub->add_option("--format", opt.format, "Primary artifact format: json or csv");
        sub->add_option("--t-del", opt.t_del, "Override the delivery time (microseconds)");
        sub->add_option("--protocol", opt.protocol, "1p-upconv, 2p-upconv, 1p-tms or 2p-tms");
        sub->add_option("--fidelity-model", opt.fidelity_model, "thermal-half or linear");
        sub->add_option("--mode", opt.mode, "Distillation model: calibrated or recurrence");
    };

    auto* analyze = app.add_subcommand("analyze", "Closed-form link metrics and delivery curve");
    add_link_options(analyze);
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo check of the delivery model");
    add_link_options(simulate);
    simulate->add_option("--trials", opt.trials, "Number of trials")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", opt.seed, "64-bit seed");
    simulate->add_flag("--dump-trials", opt.dump_trials, "Write per-trial records to trials.csv");
    auto* plan_cmd = app.add_subcommand("plan", "Architecture resource plan");
    add_link_options(plan_cmd);
    auto* tradeoff = app.add_subcommand("tradeoff", "Pareto set of links, rate and fidelity");
    add_link_options(tradeoff);
    tradeoff->add_option("--budget", opt.budget, "Transducers available")->check(CLI::PositiveNumber);
    auto* distill = app.add_subcommand("distill", "Distillation outcome");
    add_link_options(distill);
    distill->add_option("--fidelity", opt.fidelity, "Input fidelity (overrides the config)");
    distill->add_option("--rounds", opt.rounds, "Distillation rounds (overrides the config)");
    app.add_subcommand("presets", "List built-in parameter presets");

    std::vector<std::string> args(argv.size() > 1 ? argv.begin() + 1 : argv.end(), argv.end());
    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        print_error(err, "UsageError", e.what());
        return 1;
    }

    try {
        if (analyze->parsed()) return run_analyze(opt, out);
        if (simulate->parsed()) return run_simulate(opt, out);
        if (plan_cmd->parsed()) return run_plan(opt, out);
        if (tradeoff->parsed()) return run_tradeoff(opt, out);
        if (distill->parsed()) return run_distill(opt, out);
        return run_presets(out);
    } catch (const Error& e) {
        print_error(err, to_string(e.kind()), e.what());
        return e.is_config_error() ? 1 : 2;
    } catch (const std::exception& e) {
        print_error(err, "InternalError", e.what());
        return 1;
    }
}

}  // namespace qlink::cli
