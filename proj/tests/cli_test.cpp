#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"

namespace bnctl::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kModels = BNCTL_MODELS_DIR;
const std::string kExample = kModels + "/example1.bnet";
const std::string kMyeloid = kModels + "/myeloid.bnet";

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "bnctl");
    std::ostringstream out, err;
    int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() / ("bnctl_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path_ / name) << text;
        return (path_ / name).string();
    }
    std::string str() const { return path_.string(); }

private:
    fs::path path_;
};

// Structural check of the report layout shared by every JSON-emitting command.
void expect_report_schema(const json& j) {
    ASSERT_TRUE(j.is_object());
    EXPECT_TRUE(j.at("model").is_string());
    EXPECT_TRUE(j.at("n").is_number_unsigned());
    EXPECT_TRUE(j.at("edges").is_number_unsigned());
    ASSERT_TRUE(j.at("attractors").is_array());
    for (std::size_t k = 0; k < j["attractors"].size(); ++k) {
        const json& a = j["attractors"][k];
        EXPECT_EQ(a.at("id"), k);
        EXPECT_TRUE(a.at("type") == "singleton" || a.at("type") == "cyclic");
        EXPECT_TRUE(a.at("size").is_number_unsigned() || a.at("size").is_string());
        if (a.contains("states")) EXPECT_TRUE(a["states"].is_array());
    }
    ASSERT_TRUE(j.at("controls").is_array());
    for (const json& c : j["controls"]) {
        EXPECT_TRUE(c.at("target").is_number_unsigned());
        EXPECT_TRUE(c.at("mode") == "temporary" || c.at("mode") == "instantaneous");
        EXPECT_TRUE(c.at("zeta").is_number_unsigned());
        EXPECT_TRUE(c.at("seconds").is_null() || c.at("seconds").is_number());
        ASSERT_TRUE(c.at("sets").is_array());
        for (const json& s : c["sets"]) {
            EXPECT_TRUE(s.at("zero").is_array());
            EXPECT_TRUE(s.at("one").is_array());
            EXPECT_EQ(s.at("size"), s["zero"].size() + s["one"].size());
            EXPECT_TRUE(s.at("schema").is_number_unsigned());
            EXPECT_TRUE(s.at("pattern").is_string());
            EXPECT_TRUE(s.at("instantaneous_sufficient").is_boolean());
        }
    }
}

TEST(Attractors, ExampleText) {
    Outcome r = invoke({"attractors", kExample});
    ASSERT_EQ(r.code, kOk) << r.err;
    EXPECT_NE(r.out.find("variables: 3  edges: 4"), std::string::npos);
    EXPECT_NE(r.out.find("attractors: 3 (3 singleton, 0 cyclic)"), std::string::npos);
    EXPECT_NE(r.out.find("[0] singleton 000\n  [1] singleton 110\n  [2] singleton 111\n"), std::string::npos);
}

TEST(Attractors, ExampleJson) {
    Outcome r = invoke({"attractors", kExample, "--json"});
    ASSERT_EQ(r.code, kOk) << r.err;
    json j = json::parse(r.out);
    expect_report_schema(j);
    EXPECT_EQ(j["n"], 3);
    EXPECT_EQ(j["edges"], 4);
    ASSERT_EQ(j["attractors"].size(), 3u);
    EXPECT_EQ(j["attractors"][0], (json{{"id", 0}, {"type", "singleton"}, {"size", 1}, {"states", {"000"}}}));
    EXPECT_EQ(j["attractors"][2]["states"], json({"111"}));
}

TEST(Attractors, Myeloid) {
    Outcome r = invoke({"attractors", kMyeloid, "--json"});
    ASSERT_EQ(r.code, kOk) << r.err;
    json j = json::parse(r.out);
    expect_report_schema(j);
    EXPECT_EQ(j["n"], 11);
    EXPECT_EQ(j["edges"], 30);
    ASSERT_EQ(j["attractors"].size(), 6u);
    for (const json& a : j["attractors"]) EXPECT_EQ(a["type"], "singleton");
}

TEST(Attractors, CyclicLabel) {
    TempDir dir;
    std::string path = dir.write("osc.bnet", "targets, factors\na, !a\nb, b\n");
    Outcome r = invoke({"attractors", path});
    ASSERT_EQ(r.code, kOk) << r.err;
    EXPECT_NE(r.out.find("[0] cyclic size=2 representative=00"), std::string::npos);
}

TEST(Basins, Example) {
    Outcome r = invoke({"basins", kExample, "--target", "0"});
    ASSERT_EQ(r.code, kOk) << r.err;
    EXPECT_NE(r.out.find("|WB| = 6"), std::string::npos);
    EXPECT_NE(r.out.find("|SB| = 2"), std::string::npos);
    EXPECT_NE(r.out.find("WB: 000 001 010 011 100 101"), std::string::npos);
    EXPECT_NE(r.out.find("SB: 000 001\n"), std::string::npos);

    json j = json::parse(invoke({"basins", kExample, "--json"}).out);
    expect_report_schema(j);
    ASSERT_EQ(j["basins"].size(), 3u);
    EXPECT_EQ(j["basins"][0]["weak"], 6);
    EXPECT_EQ(j["basins"][0]["strong"], 2);
    EXPECT_EQ(j["basins"][2]["weak_states"], json({"011", "101", "111"}));
}

TEST(Basins, SingleAttractorCoversSpace) {
    TempDir dir;
    std::string path = dir.write("one.bnet", "targets, factors\na, 1\nb, a\nc, !b\nd, c | a\n");
    json j = json::parse(invoke({"basins", path, "--json"}).out);
    ASSERT_EQ(j["basins"].size(), 1u);
    EXPECT_EQ(j["basins"][0]["weak"], 16);
    EXPECT_EQ(j["basins"][0]["strong"], 16);
}

TEST(Control, ExampleTemporary) {
    Outcome r = invoke({"control", kExample, "--target", "0", "--all"});
    ASSERT_EQ(r.code, kOk) << r.err;
    EXPECT_NE(r.out.find("target [0] 000  mode temporary  zeta 1"), std::string::npos);
    EXPECT_NE(r.out.find("{x1:=0}  size 1  schema 0 (0**)"), std::string::npos);
    EXPECT_NE(r.out.find("{x2:=0}  size 1  schema 1 (10*)"), std::string::npos);
    EXPECT_EQ(r.out.find("seconds"), std::string::npos);
}

TEST(Control, ExampleInstantaneous) {
    Outcome r = invoke({"control", kExample, "--target", "0", "--mode", "instantaneous", "--json"});
    ASSERT_EQ(r.code, kOk) << r.err;
    json j = json::parse(r.out);
    expect_report_schema(j);
    ASSERT_EQ(j["controls"].size(), 1u);
    const json& c = j["controls"][0];
    EXPECT_EQ(c["mode"], "instantaneous");
    ASSERT_EQ(c["sets"].size(), 1u);
    EXPECT_EQ(c["sets"][0]["zero"], json({"x1", "x2"}));
    EXPECT_EQ(c["sets"][0]["one"], json::array());
    EXPECT_EQ(c["sets"][0]["size"], 2);
    EXPECT_TRUE(c["seconds"].is_null());
}

TEST(Control, AllTargetsByDefaultAndTimings) {
    json j = json::parse(invoke({"control", kExample, "--json", "--timings"}).out);
    expect_report_schema(j);
    ASSERT_EQ(j["controls"].size(), 3u);
    for (const json& c : j["controls"]) EXPECT_GE(c["seconds"].get<double>(), 0.0);
    EXPECT_EQ(j["controls"][2]["zeta"], 2);
}

TEST(Control, MyeloidGranulocyte) {
    Outcome r = invoke({"control", kMyeloid, "--target", "2", "--json"});
    ASSERT_EQ(r.code, kOk) << r.err;
    json j = json::parse(r.out);
    expect_report_schema(j);
    EXPECT_EQ(j["attractors"][2]["states"], json({"00000011001"}));
    std::set<std::string> thirds;
    for (const json& s : j["controls"][0]["sets"]) {
        if (s["size"] != 3) continue;
        std::set<std::string> one(s["one"].begin(), s["one"].end());
        EXPECT_TRUE(one.count("CEBPa") && one.count("PU1"));
        for (const auto& name : s["zero"]) thirds.insert(name.get<std::string>() + ":=0");
        for (const auto& name : s["one"])
            if (name != "CEBPa" && name != "PU1") thirds.insert(name.get<std::string>() + ":=1");
    }
    EXPECT_EQ(thirds, (std::set<std::string>{"cJun:=0", "EgrNab:=0", "Gfi1:=1"}));
}

TEST(Control, ByteIdenticalReruns) {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"control", kMyeloid, "--json", "--seed", "7"},
             {"control", kMyeloid, "--order", "PU1,CEBPa,GATA1,GATA2,FOG1,EKLF,Fli1,SCL,cJun,EgrNab,Gfi1"},
             {"control", kExample, "--mode", "instantaneous"}}) {
        Outcome a = invoke(args);
        Outcome b = invoke(args);
        ASSERT_EQ(a.code, kOk) << a.err;
        EXPECT_EQ(a.out, b.out);
    }
}

TEST(Control, SeedDoesNotChangeResults) {
    EXPECT_EQ(invoke({"control", kMyeloid, "--seed", "1"}).out, invoke({"control", kMyeloid, "--seed", "99"}).out);
}

TEST(ExitCodes, BadArgumentsAndTargets) {
    EXPECT_EQ(invoke({"control", kExample, "--target", "3"}).code, kBadArguments);
    EXPECT_EQ(invoke({"control", kExample, "--target", "-1"}).code, kBadArguments);
    EXPECT_EQ(invoke({"basins", kExample, "--target", "9"}).code, kBadArguments);
    EXPECT_EQ(invoke({"control", kExample, "--mode", "permanent"}).code, kBadArguments);
    EXPECT_EQ(invoke({"control", kExample, "--max-size", "-2"}).code, kBadArguments);
    EXPECT_EQ(invoke({"control", kExample, "--order", "x1,x2"}).code, kBadArguments);
    EXPECT_EQ(invoke({"control", kExample, "--order", "x1,x2,x9"}).code, kBadArguments);
    EXPECT_EQ(invoke({"control", kExample, "--order", "x1,x1,x2"}).code, kBadArguments);
    EXPECT_EQ(invoke({"attractors", kModels + "/does_not_exist.bnet"}).code, kBadArguments);
    EXPECT_EQ(invoke({"frobnicate"}).code, kBadArguments);
    EXPECT_EQ(invoke({}).code, kBadArguments);
    EXPECT_EQ(invoke({"attractors"}).code, kBadArguments);
    EXPECT_EQ(invoke({"bench", kExample}).code, kBadArguments);
    EXPECT_EQ(invoke({"bench", kModels, "--timeout", "0"}).code, kBadArguments);
}

TEST(ExitCodes, ParseErrors) {
    TempDir dir;
    std::string path = dir.write("broken.bnet", "targets, factors\na, a & (b\n");
    Outcome r = invoke({"attractors", path});
    EXPECT_EQ(r.code, kParseError);
    EXPECT_NE(r.err.find("line 2"), std::string::npos);
}

TEST(ExitCodes, HelpIsSuccess) {
    Outcome r = invoke({"--help"});
    EXPECT_EQ(r.code, kOk);
    EXPECT_NE(r.out.find("control"), std::string::npos);
}

TEST(Bench, ExampleRow) {
    TempDir dir;
    fs::copy_file(kExample, dir.str() + "/example1.bnet");
    Outcome r = invoke({"bench", dir.str()});
    ASSERT_EQ(r.code, kOk) << r.err;
    std::istringstream lines(r.out);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    EXPECT_EQ(header, "model, nodes, edges, singleton, cyclic, detect_s, control_s, per_attractor_s");
    EXPECT_EQ(row.rfind("example1, 3, 4, 3, 0, ", 0), 0u) << row;

    json j = json::parse(invoke({"bench", dir.str(), "--json"}).out);
    ASSERT_EQ(j["rows"].size(), 1u);
    const json& e = j["rows"][0];
    EXPECT_EQ(e["n"], 3);
    EXPECT_EQ(e["singleton"], 3);
    EXPECT_LT(e["detect_seconds"].get<double>(), 1.0);
    EXPECT_LT(e["control_seconds"].get<double>(), 1.0);
    ASSERT_EQ(e["per_attractor"].size(), 3u);
    EXPECT_EQ(e["per_attractor"][0]["min_size"], 1);
}

TEST(Bench, EmptyDirectory) {
    TempDir dir;
    Outcome r = invoke({"bench", dir.str()});
    EXPECT_EQ(r.code, kOk);
    EXPECT_EQ(r.out, "model, nodes, edges, singleton, cyclic, detect_s, control_s, per_attractor_s\n");
}

TEST(Bench, BrokenModelIsReportedInRow) {
    TempDir dir;
    dir.write("bad.bnet", "targets, factors\na, b\n");
    fs::copy_file(kExample, dir.str() + "/example1.bnet");
    Outcome r = invoke({"bench", dir.str()});
    EXPECT_EQ(r.code, kOk);
    EXPECT_NE(r.out.find("bad, error: line 2"), std::string::npos);
    EXPECT_NE(r.out.find("example1, 3, 4"), std::string::npos);
}

TEST(Bench, TimeoutPrintsDash) {
    TempDir dir;
    // 22 chained toggles keep the attractor descent busy well past the timeout
    std::string text = "targets, factors\n";
    for (int i = 1; i <= 22; ++i) text += "v" + std::to_string(i) + ", !v" + std::to_string(i % 22 + 1) + "\n";
    dir.write("slow.bnet", text);
    Outcome r = invoke({"bench", dir.str(), "--timeout", "0.05"});
    EXPECT_EQ(r.code, kOk);
    EXPECT_NE(r.out.find("slow, 22, 22, -, -, -, -, -"), std::string::npos) << r.out;
}

}  // namespace
}  // namespace bnctl::cli
