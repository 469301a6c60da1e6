#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sentry/config.hpp"

using namespace sentry;
using namespace sentry::config;

namespace {

std::string error_of(const auto& fn) {
    try {
        fn();
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << body;
    return p;
}

} // namespace

TEST(ParseConfig, DefaultsFollowTheSimulationTable) {
    const auto c = parse_config("");
    EXPECT_EQ(c.nodes, 20u);
    EXPECT_EQ(c.clusters, 4u);
    EXPECT_EQ(c.runs, 10u);
    EXPECT_EQ(c.asch.alpha, 0.7);
    EXPECT_EQ(c.asch.init, 0.5);
    EXPECT_EQ(c.rbm.hidden.size(), 3u);
    EXPECT_EQ(c.detectors, (std::vector<std::string>{"asch", "rbc", "ql", "sarsa", "td"}));
}

TEST(ParseConfig, MissingFileWithFlagsOnly) {
    const std::vector<std::string> flags = {"--train", "a.txt", "--detector=sarsa", "--runs", "3"};
    const auto c = parse_config("/nonexistent/sentry.cfg", flags);
    EXPECT_EQ(c.train, "a.txt");
    EXPECT_EQ(c.detector, "sarsa");
    EXPECT_EQ(c.runs, 3u);
    EXPECT_EQ(c.settings.get("runs"), "3");
}

TEST(ParseConfig, MalformedLineCitesLineAndKey) {
    Settings s;
    std::istringstream in("# experiment\nnodes==\n");
    const auto msg = error_of([&] { read_config(in, s, "exp.cfg"); });
    EXPECT_NE(msg.find("exp.cfg line 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("nodes"), std::string::npos) << msg;

    std::istringstream missing_eq("runs 4\n");
    EXPECT_NE(error_of([&] { read_config(missing_eq, s, "x"); }).find("x line 1"), std::string::npos);
}

TEST(ParseConfig, FlagOverridesFile) {
    const auto path = temp_file("sentry_override.cfg", "nodes = 20  # sensors\nclusters = 4\n");
    const std::vector<std::string> flags = {"--nodes", "40"};
    EXPECT_EQ(parse_config(path.string()).nodes, 20u);
    EXPECT_EQ(parse_config(path.string(), flags).nodes, 40u);
    std::filesystem::remove(path);
}

TEST(ParseConfig, UnknownDetectorNamesValidOptions) {
    const std::vector<std::string> flags = {"--detector", "foo"};
    const auto msg = error_of([&] { parse_config("", flags); });
    EXPECT_NE(msg.find("'foo'"), std::string::npos) << msg;
    EXPECT_NE(msg.find("asch, rbc, ql, sarsa, td"), std::string::npos) << msg;
    const std::vector<std::string> list = {"--detectors", "ql,bogus"};
    EXPECT_NE(error_of([&] { parse_config("", list); }).find("'bogus'"), std::string::npos);
}

TEST(ParseConfig, BadValuesNameTheKey) {
    auto msg = error_of([] { parse_config("", std::vector<std::string>{"--runs", "0"}); });
    EXPECT_NE(msg.find("'runs'"), std::string::npos) << msg;
    msg = error_of([] { parse_config("", std::vector<std::string>{"--rl.gamma", "abc"}); });
    EXPECT_NE(msg.find("'rl.gamma'"), std::string::npos) << msg;
    msg = error_of([] { parse_config("", std::vector<std::string>{"--bogus", "1"}); });
    EXPECT_NE(msg.find("'bogus'"), std::string::npos) << msg;
    msg = error_of([] { parse_config("", std::vector<std::string>{"--nodes"}); });
    EXPECT_NE(msg.find("needs a value"), std::string::npos) << msg;
    msg = error_of([] { parse_config("", std::vector<std::string>{"--clusters", "30"}); });
    EXPECT_NE(msg.find("'clusters'"), std::string::npos) << msg;
}

TEST(ParseConfig, EffectiveValuesAreEchoed) {
    const auto c = parse_config("", std::vector<std::string>{"--seed", "7"});
    const auto j = c.settings.to_json();
    EXPECT_EQ(j["seed"], "7");
    EXPECT_EQ(j["sim_time"], "600");
    EXPECT_EQ(j["packet_size"], "250");
    EXPECT_TRUE(j.contains("forest.trees"));
}

TEST(ParseConfig, InfinityAndLists) {
    const auto c = parse_config("", std::vector<std::string>{"--rbm.hidden", "10, 5", "--seeds", "4,5"});
    EXPECT_EQ(c.rbm.hidden, (std::vector<std::size_t>{10, 5}));
    EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{4, 5}));
    EXPECT_TRUE(std::isinf(c.dbscan.variance));
}
