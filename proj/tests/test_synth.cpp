#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "sentry/kdd.hpp"
#include "sentry/synth.hpp"

using namespace sentry;

TEST(Synth, FormatParsesBack) {
    const auto records = synth::make_records(synth::Split::Test, 2000, 3);
    for (const auto& r : records) {
        const auto line = synth::format_record(r);
        const auto back = kdd::parse_record(line);
        EXPECT_EQ(back.protocol, r.protocol);
        EXPECT_EQ(back.service, r.service);
        EXPECT_EQ(back.flag, r.flag);
        EXPECT_EQ(back.label, r.label);
        EXPECT_EQ(synth::format_record(back), line);
    }
}

TEST(Synth, EveryLabelIsKnownAndGrouped) {
    const auto labels = kdd::LabelMap::kdd();
    for (auto split : {synth::Split::Train, synth::Split::Test})
        for (const auto& [label, weight] : synth::label_mix(split)) {
            EXPECT_TRUE(labels.contains(label)) << label;
            EXPECT_GT(weight, 0.0);
        }
}

TEST(Synth, MixMatchesPublishedRowCounts) {
    double train = 0.0, test = 0.0;
    for (const auto& [l, w] : synth::label_mix(synth::Split::Train)) train += w;
    for (const auto& [l, w] : synth::label_mix(synth::Split::Test)) test += w;
    EXPECT_EQ(train, static_cast<double>(synth::kTrainRows));
    EXPECT_EQ(test, static_cast<double>(synth::kTestRows));
}

TEST(Synth, DeterministicUnderSeed) {
    std::ostringstream a, b, c;
    synth::write_corpus(a, synth::Split::Train, 500, 11);
    synth::write_corpus(b, synth::Split::Train, 500, 11);
    synth::write_corpus(c, synth::Split::Train, 500, 12);
    EXPECT_EQ(a.str(), b.str());
    EXPECT_NE(a.str(), c.str());
}

TEST(Synth, ReadsAsCleanCorpus) {
    std::stringstream s;
    synth::write_corpus(s, synth::Split::Train, 3000, 5);
    kdd::ParseReport rep;
    const auto records = kdd::read_records(s, rep);
    EXPECT_EQ(records.size(), 3000u);
    EXPECT_EQ(rep.field_count_errors, 0u);
    EXPECT_EQ(rep.numeric_errors, 0u);
    std::map<std::string, std::size_t> protocols;
    for (const auto& r : records) ++protocols[r.protocol];
    for (const auto& [p, n] : protocols) EXPECT_TRUE(p == "tcp" || p == "udp" || p == "icmp") << p;
}
