#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "qlink/io.hpp"
#include "test_helpers.hpp"

namespace qlink {
namespace {

namespace fs = std::filesystem;
using io::Json;

const fs::path kConfigs = QLINK_CONFIG_DIR;

std::string config_error(const std::string& text) {
    try {
        io::parse_config_text(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    ADD_FAILURE() << "no error for " << text;
    return {};
}

const char* kExample1 = R"({
  "transducer": "preset:transducer1",
  "qubit": "preset:qubit1",
  "protocol": {"basis": "one_photon", "pump": "tms"},
  "policy": {"t_del_us": 88}
})";

TEST(ParseConfig, ShippedExamplesMatchFixtures) {
    EXPECT_EQ(*io::parse_config(kConfigs / "ex1.json").link, testing::example1());
    EXPECT_EQ(*io::parse_config(kConfigs / "ex2.json").link, testing::example2());
    EXPECT_EQ(*io::parse_config(kConfigs / "ex3.json").link, testing::example3());
}

TEST(ParseConfig, PresetExpandsToBuiltinValues) {
    const auto c = *io::parse_config_text(kExample1).link;
    EXPECT_EQ(c.transducer.eta_mw, 0.8);
    EXPECT_EQ(c.transducer.p_mo, 0.01);
    EXPECT_EQ(c.transducer.eta_det, 0.5);
    EXPECT_EQ(c.transducer.n_th, 0.1);
    EXPECT_EQ(c.qubit.t_coh_us, 200.0);
    const auto resolved = io::to_json(c);
    EXPECT_EQ(resolved["transducer"]["eta_mw"], 0.8);
    EXPECT_EQ(resolved["policy"]["fidelity_model"], "thermal_half");
    EXPECT_EQ(resolved["policy"]["n_parallel"], 1);
}

TEST(ParseConfig, ArchitectureFiles) {
    const auto lattice = io::parse_config(kConfigs / "lattice.json");
    ASSERT_TRUE(lattice.architecture && lattice.link);
    EXPECT_EQ(lattice.architecture->qubits_per_processor, 1000);
    EXPECT_EQ(lattice.architecture->kind, ArchitectureKind::LatticeSurgery);
    const auto sparse = io::parse_config(kConfigs / "sparse.json");
    EXPECT_EQ(sparse.architecture->kind, ArchitectureKind::SparseLinks);
}

TEST(ParseConfig, EmptyFileIsRootSchemaError) {
    EXPECT_EQ(config_error("").rfind("schema error at root", 0), 0u);
    EXPECT_EQ(config_error("[1, 2]").rfind("schema error at root", 0), 0u);
}

TEST(ParseConfig, UnknownKeysCarryPointer) {
    auto j = Json::parse(kExample1);
    j["policy"]["t_dell_us"] = 3;
    EXPECT_NE(config_error(j.dump()).find("/policy/t_dell_us"), std::string::npos);

    j = Json::parse(kExample1);
    j["colour"] = "red";
    EXPECT_NE(config_error(j.dump()).find("/colour"), std::string::npos);

    j = Json::parse(kExample1);
    j["protocol"]["pump"] = "laser";
    EXPECT_NE(config_error(j.dump()).find("/protocol/pump"), std::string::npos);
}

TEST(ParseConfig, MissingAndMistypedValues) {
    auto j = Json::parse(kExample1);
    j.erase("policy");
    EXPECT_NE(config_error(j.dump()).find("policy"), std::string::npos);

    j = Json::parse(kExample1);
    j["policy"]["n_parallel"] = 2.5;
    EXPECT_NE(config_error(j.dump()).find("/policy/n_parallel"), std::string::npos);

    j = Json::parse(kExample1);
    j["transducer"] = "preset:transducer9";
    EXPECT_THROW(io::parse_config_text(j.dump()), Error);
}

TEST(ParseConfig, InvariantViolationNamesField) {
    auto j = Json::parse(kExample1);
    j["transducer"] = Json{{"eta_mw", 1.2}, {"p_mo", 0.01}, {"eta_det", 0.5}, {"n_th", 0.1}, {"t_rep_us", 1}};
    const auto msg = config_error(j.dump());
    EXPECT_NE(msg.find("invariant violation"), std::string::npos);
    EXPECT_NE(msg.find("transducer.eta_mw"), std::string::npos) << msg;
}

TEST(ParseConfig, InfiniteCoherence) {
    auto j = Json::parse(kExample1);
    j["qubit"] = Json{{"t1_us", 500}, {"t2_us", 200}, {"t_coh_us", "inf"}};
    const auto c = *io::parse_config_text(j.dump()).link;
    EXPECT_TRUE(std::isinf(c.qubit.t_coh_us));
    EXPECT_EQ(io::to_json(c)["qubit"]["t_coh_us"], "inf");
}

TEST(ParseConfig, MissingFileIsIoError) {
    testing::expect_error_kind([] { io::parse_config("/nonexistent/qlink.json"); }, ErrorKind::Io);
}

TEST(ParseConfig, RoundTrip) {
    for (const char* name : {"ex1.json", "ex2.json", "ex3.json", "lattice.json", "sparse.json"}) {
        const auto parsed = io::parse_config(kConfigs / name);
        const auto again = io::parse_config_text(io::to_json(parsed).dump());
        EXPECT_EQ(again.link, parsed.link) << name;
        EXPECT_EQ(again.architecture, parsed.architecture) << name;
    }
    auto c = testing::example3();
    c.transducer.eta_det = 0.1 + 0.2;  // not representable in 9 digits
    c.policy.decoherence_multiplier = 2.0;
    c.policy.fidelity_model = FidelityModel::LinearSum;
    EXPECT_EQ(*io::parse_config_text(io::to_json(c).dump()).link, c);
}

TEST(Report, NineSignificantDigits) {
    EXPECT_EQ(io::round9(0.6051132123707329), 0.605113212);
    EXPECT_EQ(io::format9(0.6051132123707329), "0.605113212");
    EXPECT_EQ(io::format9(88.0), "88");
    EXPECT_EQ(io::round9(0.0), 0.0);

    const auto m = delivered_fidelity(testing::example1());
    const auto j = io::to_json(m);
    std::vector<std::string> keys;
    for (const auto& [k, _] : j.items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"p_her", "i_prot", "i_th", "f_her", "eta_link",
                                              "p_success", "f_del"}));
    EXPECT_EQ(j["f_del"], 0.605113212);
}

TEST(Report, CsvHeaders) {
    const auto curve = delivery_curve(delivery_model(testing::example1()), 3);
    const auto csv = io::delivery_curve_csv(curve);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "t_del_us,p_success,f_del");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
    EXPECT_EQ(io::metrics_csv(delivered_fidelity(testing::example1())).substr(0, 5), "p_her");
}

TEST(Report, BreakdownExample3) {
    const auto c = testing::example3();
    const auto m = delivered_fidelity(c);
    const auto b = io::infidelity_breakdown(c, m);
    EXPECT_NEAR(b.protocol, 0.069, 1e-12);
    EXPECT_NEAR(b.thermal, 0.009025, 1e-12);
    EXPECT_NEAR(b.storage_and_fallback, m.f_her - m.f_del, 1e-15);
    EXPECT_NEAR(b.protocol + b.thermal, b.total_heralded, 1e-12);
    EXPECT_NEAR(b.total_heralded + b.storage_and_fallback, b.total_delivered, 1e-12);
    const auto csv = io::breakdown_csv(b);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "component,probabilistic,on_demand");
}

TEST(Artifact, WriteThenRename) {
    const auto dir = fs::temp_directory_path() / "qlink_io_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    io::write_artifact(dir / "a.txt", "hello\n");
    std::ifstream in(dir / "a.txt");
    std::stringstream s;
    s << in.rdbuf();
    EXPECT_EQ(s.str(), "hello\n");
    EXPECT_FALSE(fs::exists(dir / "a.txt.tmp"));
    testing::expect_error_kind([&] { io::write_artifact(dir / "missing" / "b.txt", "x"); },
                               ErrorKind::Io);
    fs::remove_all(dir);
}

TEST(Manifest, Fields) {
    io::RunManifest m;
    m.command = "simulate";
    m.seed = 7;
    m.config = io::to_json(testing::example1());
    m.started_at = m.finished_at = "2024-01-01T00:00:00Z";
    const auto j = io::to_json(m);
    EXPECT_EQ(j["tool_version"], io::kToolVersion);
    EXPECT_EQ(j["seed"], 7);
    EXPECT_EQ(io::link_config_from_json(j["config"]), testing::example1());
}

}  // namespace
}  // namespace qlink
