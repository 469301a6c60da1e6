#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sentry/kdd.hpp"
#include "sentry/synth.hpp"

using namespace sentry;
using namespace sentry::kdd;

namespace {

// First line of the published 10% training file.
const std::string kFirstLine =
    "0,tcp,http,SF,181,5450,0,0,0,0,0,1,0,0,0,0,0,0,0,0,0,0,8,8,0.00,0.00,0.00,0.00,1.00,0.00,0.00,9,9,"
    "1.00,0.00,0.11,0.00,0.00,0.00,0.00,0.00,normal.";

std::string line_with(std::string protocol, std::string service, std::string flag, std::string label) {
    return "0," + protocol + "," + service + "," + flag +
           ",10,20,0,0,0,0,0,1,0,0,0,0,0,0,0,0,0,0,1,1,0.00,0.00,0.00,0.00,1.00,0.00,0.00,1,1,"
           "1.00,0.00,0.00,0.00,0.00,0.00,0.00,0.00," +
           label;
}

} // namespace

TEST(ParseRecord, FirstLineOfTenPercentFile) {
    auto r = parse_record(kFirstLine);
    EXPECT_EQ(r.protocol, "tcp");
    EXPECT_EQ(r.service, "http");
    EXPECT_EQ(r.flag, "SF");
    EXPECT_EQ(r.label, "normal");
    EXPECT_EQ(r.duration(), 0.0);
    EXPECT_EQ(r.numeric[1], 181.0);  // src_bytes
    EXPECT_EQ(r.numeric[2], 5450.0); // dst_bytes
    EXPECT_EQ(r.numeric[37], 0.0);
    EXPECT_EQ(r.numeric[35 - 3], 0.11); // dst_host_same_src_port_rate
}

TEST(ParseRecord, FieldCount) {
    auto cut = kFirstLine.substr(0, kFirstLine.rfind(','));
    EXPECT_THROW(parse_record(cut), FieldCountError);
    EXPECT_THROW(parse_record(kFirstLine + ",extra"), FieldCountError);
    EXPECT_THROW(parse_record(""), FieldCountError);
}

TEST(ParseRecord, NumericField) {
    auto bad = kFirstLine;
    bad.replace(bad.find("181"), 3, "abc");
    EXPECT_THROW(parse_record(bad), NumericParseError);
}

TEST(ParseRecord, LabelPeriodStripped) {
    EXPECT_EQ(strip_label("normal."), "normal");
    EXPECT_EQ(strip_label("smurf"), "smurf");
    EXPECT_EQ(parse_record(line_with("udp", "private", "SF", "teardrop.\r")).label, "teardrop");
}

TEST(Encode, ProtocolCodes) {
    std::vector<ConnectionRecord> recs = {parse_record(line_with("tcp", "http", "SF", "normal.")),
                                          parse_record(line_with("icmp", "ecr_i", "SF", "smurf.")),
                                          parse_record(line_with("udp", "private", "SF", "normal."))};
    auto table = EncodingTable::build(recs);
    auto tcp = encode(recs[0], table);
    auto icmp = encode(recs[1], table);
    auto udp = encode(recs[2], table);
    EXPECT_EQ(std::vector<double>(tcp.begin() + 1, tcp.begin() + 4), (std::vector<double>{0, 0, 1}));
    EXPECT_EQ(std::vector<double>(icmp.begin() + 1, icmp.begin() + 4), (std::vector<double>{0, 1, 0}));
    EXPECT_EQ(std::vector<double>(udp.begin() + 1, udp.begin() + 4), (std::vector<double>{0, 1, 1}));
    EXPECT_EQ(tcp.size(), kEncodedWidth);
}

TEST(Encode, UnknownCategories) {
    std::vector<ConnectionRecord> recs = {parse_record(line_with("tcp", "http", "SF", "normal.")),
                                          parse_record(line_with("icmp", "ecr_i", "SF", "smurf."))};
    auto table = EncodingTable::build(recs);
    auto sctp = parse_record(line_with("sctp", "http", "SF", "normal."));
    EXPECT_THROW(encode(sctp, table), UnknownCategoryError);
    auto odd = parse_record(line_with("tcp", "gopher", "SF", "normal."));
    EXPECT_THROW(encode(odd, table), UnknownCategoryError);
    auto v = encode(odd, table, EncodingTable::Unknown::MapToUnseen);
    EXPECT_EQ(v[kServiceColumn], static_cast<double>(table.service_count()));
}

TEST(Encode, FrequencyRankWithAlphabeticalTies) {
    std::vector<ConnectionRecord> recs;
    for (auto s : {"smtp", "http", "http", "ftp", "private", "private", "private"})
        recs.push_back(parse_record(line_with("tcp", s, "SF", "normal.")));
    auto table = EncodingTable::build(recs);
    EXPECT_EQ(table.services(), (std::vector<std::string>{"private", "http", "ftp", "smtp"}));
    EXPECT_EQ(encode(recs[0], table)[kServiceColumn], 3.0);
}

TEST(Encode, TotalOnItsOwnTrainingSetAndProtocolRoundTrips) {
    auto recs = synth::make_records(synth::Split::Train, 3000, 4);
    auto table = EncodingTable::build(recs);
    for (const auto& r : recs) {
        auto v = encode(r, table);
        EXPECT_EQ(decode_protocol(std::span(v).subspan(kProtocolColumn, 3)), r.protocol);
    }
}

TEST(GroupAttack, PublishedExamples) {
    EXPECT_EQ(group_attack("neptune"), AttackClass::DoS);
    EXPECT_EQ(group_attack("teardrop"), AttackClass::DoS);
    EXPECT_EQ(group_attack("portsweep"), AttackClass::Probe);
    EXPECT_EQ(group_attack("ipsweep"), AttackClass::Probe);
    EXPECT_EQ(group_attack("normal"), AttackClass::Normal);
    EXPECT_EQ(group_attack("bufferoverflow"), AttackClass::U2R);
    EXPECT_EQ(group_attack("buffer_overflow"), AttackClass::U2R);
}

TEST(GroupAttack, StrictAndLenient) {
    auto map = LabelMap::kdd();
    EXPECT_THROW(map.group("nosuchattack"), UnknownLabelError);
    map.set_mode(LabelMap::Mode::Lenient, AttackClass::R2L);
    EXPECT_EQ(map.group("nosuchattack"), AttackClass::R2L);
}

TEST(GroupAttack, EveryKddLabelHasAGroup) {
    const auto map = LabelMap::kdd();
    for (auto split : {synth::Split::Train, synth::Split::Test})
        for (const auto& [label, _] : synth::label_mix(split)) EXPECT_TRUE(map.contains(label)) << label;
    EXPECT_EQ(truth_of(AttackClass::Normal), Verdict::Normal);
    for (auto c : {AttackClass::DoS, AttackClass::Probe, AttackClass::R2L, AttackClass::U2R})
        EXPECT_EQ(truth_of(c), Verdict::Intrusive);
}

TEST(Normalizer, MinMaxBoundaries) {
    Dataset d;
    d.push_back({1.0, 5.0, 7.0}, AttackClass::Normal);
    d.push_back({3.0, 5.0, 9.0}, AttackClass::DoS);
    d.push_back({2.0, 5.0, 8.0}, AttackClass::DoS);
    auto b = fit_normalizer(d);
    auto n = apply_normalizer(b, d);
    EXPECT_EQ(n.x[0][0], 0.0);
    EXPECT_EQ(n.x[1][0], 1.0);
    EXPECT_EQ(n.x[2][0], 0.5);
    for (const auto& v : n.x) EXPECT_EQ(v[1], 0.0);
    std::vector<double> outside = {10.0, 1.0, -3.0};
    EXPECT_EQ(apply_normalizer(b, outside), (std::vector<double>{1.0, 0.0, 0.0}));
    std::vector<double> narrow = {1.0};
    EXPECT_THROW(apply_normalizer(b, narrow), DimensionMismatchError);
}

TEST(Normalizer, TrainingDataLiesInUnitBox) {
    auto recs = synth::make_records(synth::Split::Train, 2000, 9);
    auto table = EncodingTable::build(recs);
    ParseReport rep;
    auto d = to_dataset(recs, table, LabelMap::kdd(), rep);
    auto n = apply_normalizer(fit_normalizer(d), d);
    for (const auto& v : n.x)
        for (double x : v) {
            EXPECT_GE(x, 0.0);
            EXPECT_LE(x, 1.0);
        }
}

TEST(SampleSplit, FractionsAndDeterminism) {
    Dataset d;
    for (int i = 0; i < 101; ++i) d.push_back({static_cast<double>(i)}, i % 2 ? AttackClass::DoS : AttackClass::Normal);
    auto [all, none] = sample_split(d, 1.0, 3);
    EXPECT_EQ(all.size(), 101u);
    EXPECT_TRUE(none.empty());
    auto [empty, full] = sample_split(d, 0.0, 3);
    EXPECT_TRUE(empty.empty());
    EXPECT_EQ(full.size(), 101u);

    auto [a1, b1] = sample_split(d, 0.3, 17);
    auto [a2, b2] = sample_split(d, 0.3, 17);
    EXPECT_EQ(a1.size(), 30u);
    EXPECT_EQ(a1.x, a2.x);
    EXPECT_EQ(b1.x, b2.x);
    std::multiset<double> u;
    for (const auto& v : a1.x) u.insert(v[0]);
    for (const auto& v : b1.x) u.insert(v[0]);
    std::multiset<double> expect;
    for (int i = 0; i < 101; ++i) expect.insert(i);
    EXPECT_EQ(u, expect);
    EXPECT_THROW(sample_split(d, 1.5, 1), std::invalid_argument);
}

TEST(Dataset, WidthIsConstant) {
    Dataset d;
    d.push_back({1.0, 2.0}, AttackClass::Normal);
    EXPECT_THROW(d.push_back({1.0}, AttackClass::Normal), DimensionMismatchError);
}

TEST(ReadRecords, CountsErrorsAndLabels) {
    std::stringstream in;
    in << kFirstLine << '\n' << "\n" << "1,2,3\n" << line_with("icmp", "ecr_i", "SF", "smurf.") << '\n';
    ParseReport rep;
    auto recs = read_records(in, rep, true);
    EXPECT_EQ(recs.size(), 2u);
    EXPECT_EQ(rep.lines, 3u);
    EXPECT_EQ(rep.field_count_errors, 1u);
    EXPECT_EQ(rep.label_counts["smurf"], 1u);

    std::stringstream again;
    again << kFirstLine << "\n1,2,3\n";
    ParseReport rep2;
    try {
        read_records(again, rep2, false);
        FAIL() << "expected FieldCountError";
    } catch (const FieldCountError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(ToDataset, UnknownLabelsCountedNotDropped) {
    std::vector<ConnectionRecord> recs = {parse_record(line_with("tcp", "http", "SF", "normal.")),
                                          parse_record(line_with("tcp", "http", "SF", "madeup."))};
    auto table = EncodingTable::build(recs);
    ParseReport strict;
    auto d = to_dataset(recs, table, LabelMap::kdd(), strict);
    EXPECT_EQ(d.size(), 1u);
    EXPECT_EQ(strict.unknown_labels, 1u);
    EXPECT_EQ(strict.unknown_label_counts["madeup"], 1u);

    auto lenient = LabelMap::kdd();
    lenient.set_mode(LabelMap::Mode::Lenient);
    ParseReport rep;
    auto d2 = to_dataset(recs, table, lenient, rep);
    EXPECT_EQ(d2.size(), 2u);
    EXPECT_EQ(rep.unknown_labels, 1u);
}

TEST(EncodedCsv, HeaderNamesEveryColumn) {
    std::vector<ConnectionRecord> recs = {parse_record(kFirstLine)};
    auto table = EncodingTable::build(recs);
    ParseReport rep;
    auto d = to_dataset(recs, table, LabelMap::kdd(), rep);
    std::ostringstream out;
    write_encoded_csv(out, d);
    std::istringstream lines(out.str());
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    EXPECT_EQ(std::count(header.begin(), header.end(), ','), static_cast<long>(kEncodedWidth + 1));
    EXPECT_EQ(std::count(row.begin(), row.end(), ','), static_cast<long>(kEncodedWidth + 1));
    EXPECT_EQ(header.rfind("duration,protocol_b0,protocol_b1,protocol_b2,service,flag,src_bytes", 0), 0u);
}
