// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <omp.h>

#include "../oracles/density_matrix_oracle.hpp"
#include "cli.hpp"
#include "qlink/delivery.hpp"
#include "qlink/distillation.hpp"
#include "qlink/errors.hpp"
#include "qlink/io.hpp"
#include "qlink/mc_sim.hpp"
#include "qlink/planner.hpp"
#include "qlink/protocol.hpp"

namespace fs = std::filesystem;
using namespace qlink;

namespace {

const fs::path kConfigs = QLINK_CONFIG_DIR;

// Collects failed checks for one criterion.
class Check {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok) failures_.push_back(what);
    }
    void near(double got, double want, double tol, const std::string& what) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s = %.9g, expected %.9g +/- %.3g", what.c_str(), got, want, tol);
        expect(std::abs(got - want) <= tol, buf);
    }
    bool ok() const { return failures_.empty(); }
    const std::vector<std::string>& failures() const { return failures_; }

private:
    std::vector<std::string> failures_;
};

LinkConfig load(const char* name) { return *io::parse_config(kConfigs / name).link; }

io::Json analyze_json(const char* name) {
    const auto dir = fs::temp_directory_path() / "qlink_acceptance";
    std::ostringstream out, err;
    const int code = cli::run_command(
        {"qlink", "analyze", "--config", (kConfigs / name).string(), "--out", dir.string()}, out, err);
    if (code != 0) throw std::runtime_error("analyze failed: " + err.str());
    return io::Json::parse(out.str());
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void example1(Check& c) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto m = delivered_fidelity(load("ex1.json"));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.near(m.i_prot, 0.208, 0.005, "i_prot");
    c.near(m.i_th, 0.128, 0.005, "i_th");
    c.near(m.f_her, 0.728, 0.010, "F_her");
    c.expect(m.f_del >= 0.55, "F_del(88) >= 0.55");
    c.expect(secs < 1.0, "runtime < 1 s");
}

void example2(Check& c) {
    const auto cfg = load("ex2.json");
    c.near(delivered_fidelity(cfg).f_del, 0.91, 0.02, "F_del(400)");
    c.near(cfg.qubit.t_coh_us, 2500.0, 0.0, "T_coh");
    auto plain = cfg;
    plain.protocol.p_her_override.reset();
    const double formula = analyze_protocol(plain).p_her;
    c.expect(std::abs(formula - 0.03) <= 0.25 * 0.03, "formula p_her within 25% of 0.03");
    const auto j = analyze_json("ex2.json");
    c.expect(j["warnings"].size() == 1 && j["analytics"].contains("p_her_relative_gap"),
             "report flags the p_her discrepancy");
}

void example3(Check& c) {
    const auto cfg = load("ex3.json");
    const auto m = delivered_fidelity(cfg);
    c.near(m.i_prot, 0.069, 0.005, "i_prot");
    c.near(m.f_del, 0.91, 0.02, "F_del(15)");
    const auto b = io::infidelity_breakdown(cfg, m);
    c.expect(b.protocol > b.thermal, "i_prot > thermal share");
    c.expect(b.protocol > b.storage_and_fallback, "i_prot > decoherence loss");
    analyze_json("ex3.json");
    const auto csv = read_file(fs::temp_directory_path() / "qlink_acceptance" / "breakdown.csv");
    c.expect(csv.rfind("component,probabilistic,on_demand\n", 0) == 0, "breakdown CSV emitted");
}

void distillation(Check& c) {
    const auto r = nested_distill(0.91, 4, DistillMode::Calibrated);
    c.near(r.f_out, 0.991, 0.001, "calibrated F_out");
    c.expect(r.pairs == 16, "16 pairs consumed");
    std::mt19937_64 rng(2024);
    std::exponential_distribution<double> e(1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        std::array<double, 4> a, b;
        double sa = 0, sb = 0;
        for (int k = 0; k < 4; ++k) sa += a[k] = e(rng), sb += b[k] = e(rng);
        for (int k = 0; k < 4; ++k) a[k] /= sa, b[k] /= sb;
        const auto want = oracle::recurrence(a, b);
        const auto got = recurrence_round({a}, {b});
        worst = std::max(worst, std::abs(got.success_probability - want.success));
        for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(got.state.p[k] - want.p[k]));
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "recurrence vs oracle max error %.3g", worst);
    c.expect(worst <= 1e-12, buf);
}

void monte_carlo(Check& c) {
    const char* names[] = {"ex1.json", "ex2.json", "ex3.json"};
    for (const char* name : names) {
        const auto cfg = load(name);
        const auto an = delivered_fidelity(cfg);
        const auto model = delivery_model(cfg);
        const double n = 1e5;
        const double se_p = std::sqrt(an.p_success * (1 - an.p_success) / n);
        int passing = 0;
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
            const auto s = run_trials(cfg, 100000, seed);
            const bool f_ok = std::abs(s.mean_f_del - an.f_del) <= 3 * s.std_error;
            const bool p_ok = std::abs(s.p_success - an.p_success) <= 3 * se_p;
            passing += f_ok && p_ok;
            if (seed == 1) {
                const auto chi = herald_histogram_chi_square(s, model.per_round_probability());
                char buf[128];
                std::snprintf(buf, sizeof buf, "%s chi-square p = %.3g (dof %d)", name, chi.p_value, chi.dof);
                c.expect(chi.p_value > 0.001, buf);
            }
        }
        char buf[96];
        std::snprintf(buf, sizeof buf, "%s: %d/100 seeds within 3 SE", name, passing);
        c.expect(passing >= 99, buf);
        std::printf("  info: %s\n", buf);
    }
}

void planner(Check& c) {
    c.expect(edge_qubit_count(1000) == 32, "edge_qubit_count(1000) = 32");
    const auto spec = io::parse_config(kConfigs / "lattice.json").architecture.value();
    for (const char* name : {"ex2.json", "ex3.json"}) {
        const auto r = lattice_surgery_plan(spec, load(name));
        c.expect(r.transducers_per_link >= 300 && r.transducers_per_link <= 400,
                 std::string(name) + " transducers per link in [300, 400]: " +
                     std::to_string(r.transducers_per_link));
    }
    c.expect(cryostat_budget_check(10, 10).total_in_envelope &&
                 cryostat_budget_check(100, 100).total_in_envelope &&
                 !cryostat_budget_check(9, 10).total_in_envelope &&
                 !cryostat_budget_check(100, 101).total_in_envelope,
             "cryostat product bounds [100, 10000]");
    const auto cut = circuit_cut_comparison(0.10, 100000);
    c.expect(cut.k_quantum && *cut.k_quantum == 50 && cut.k_classical == 10, "k = 50 vs 10");
    c.expect(circuit_cut_comparison(std::nextafter(0.30, 0.0), 100000).advantage &&
                 !circuit_cut_comparison(0.30, 100000).advantage,
             "advantage cutoff at 0.30");
}

void properties(Check& c) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    const ProtocolSpec protocols[] = {
        {PhotonBasis::OnePhoton, PumpMode::TMS, std::nullopt, std::nullopt, std::nullopt},
        {PhotonBasis::TwoPhoton, PumpMode::TMS, std::nullopt, std::nullopt, std::nullopt},
        {PhotonBasis::TwoPhoton, PumpMode::Upconversion, std::nullopt, std::nullopt, std::nullopt},
        {PhotonBasis::OnePhoton, PumpMode::Upconversion, 0.2, std::nullopt, std::nullopt},
    };
    bool p_mono = true, th_mono = true, f_mono = true, floor_ok = true;
    for (int i = 0; i < 500; ++i) {
        TransducerParams t{"r", u(rng), u(rng), u(rng), 0.02 * u(rng), 1.0, 0.0, std::nullopt};
        for (const auto& p : protocols) {
            for (double TransducerParams::*f :
                 {&TransducerParams::eta_mw, &TransducerParams::p_mo, &TransducerParams::eta_det}) {
                auto b = t;
                b.*f = std::min(1.0, t.*f * 1.3);
                p_mono &= herald_probability(b, p) >= herald_probability(t, p);
            }
            auto hot = t;
            hot.n_th *= 1.5;
            th_mono &= thermal_infidelity(hot, p) >= thermal_infidelity(t, p);
        }
        LinkConfig cfg;
        cfg.transducer = t;
        cfg.qubit = qubit_preset("qubit1");
        cfg.protocol = protocols[i % 4];
        cfg.policy.t_del_us = 1 + static_cast<double>(rng() % 200);
        cfg.policy.n_parallel = 1 + static_cast<int>(rng() % 16);
        try {
            const auto cold = delivered_fidelity(cfg);
            floor_ok &= cold.f_del >= 0.5 && cold.f_del <= 1.0;
            cfg.transducer.n_th *= 1.5;
            f_mono &= delivered_fidelity(cfg).f_del <= cold.f_del;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::ModelDomain && e.kind() != ErrorKind::DivisionDomain) throw;
        }
    }
    c.expect(p_mono, "p_her monotone in efficiencies");
    c.expect(th_mono, "i_th monotone in n_th");
    c.expect(f_mono, "F_del non-increasing in n_th");
    c.expect(floor_ok, "F_del >= 0.5");

    // Every trial delivers a state: a stored pair or the fallback.
    const auto s = run_trials(load("ex1.json"), 20000, 3);
    std::uint64_t delivered = s.failures;
    for (auto h : s.herald_histogram) delivered += h;
    c.expect(delivered == s.n_trials, "p_del = 1");

    bool pareto = true;
    for (long budget = 1; budget <= 64; ++budget) {
        const auto grid = tradeoff_grid(budget, load("ex3.json"));
        std::vector<TradeoffPoint> brute;
        for (const auto& p : grid) {
            bool beaten = false;
            for (const auto& o : grid)
                beaten |= o.n_links >= p.n_links && o.rate_mhz >= p.rate_mhz && o.f_del >= p.f_del &&
                          (o.n_links > p.n_links || o.rate_mhz > p.rate_mhz || o.f_del > p.f_del);
            if (!beaten) brute.push_back(p);
        }
        pareto &= tradeoff_surface(budget, load("ex3.json")) == brute;
    }
    c.expect(pareto, "Pareto set equals brute-force filter for budgets <= 64");

    const auto model = delivery_model(load("ex3.json"));
    omp_set_num_threads(1);
    const auto one = io::to_json(run_trials(model, 15, 100000, 7)).dump();
    omp_set_num_threads(4);
    const auto four = io::to_json(run_trials(model, 15, 100000, 7)).dump();
    omp_set_num_threads(1);
    c.expect(one == four, "MC bytes identical across thread counts");
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<void(Check&)>> criteria[] = {
        {"1 Example 1 reproduction", example1},
        {"2 Example 2 reproduction and p_her discrepancy flag", example2},
        {"3 Example 3 reproduction and protocol-limited breakdown", example3},
        {"4 Distillation calibration and recurrence oracle", distillation},
        {"5 Monte Carlo vs analytic (100 seeds x 3 examples)", monte_carlo},
        {"6 Planner anchors", planner},
        {"7 Property suites", properties},
    };
    int failed = 0;
    for (const auto& [name, run] : criteria) {
        Check c;
        try {
            run(c);
        } catch (const std::exception& e) {
            c.expect(false, std::string("exception: ") + e.what());
        }
        std::printf("%s criterion %s\n", c.ok() ? "PASS" : "FAIL", name);
        for (const auto& f : c.failures()) std::printf("  - %s\n", f.c_str());
        std::fflush(stdout);
        failed += !c.ok();
    }
    fs::remove_all(fs::temp_directory_path() / "qlink_acceptance");
    return failed ? 1 : 0;
}
