#pragma once

// KDD'99 connection records: parsing, categorical encoding, attack grouping,
// min-max scaling and seeded sampling.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sentry/error.hpp"
#include "sentry/types.hpp"

namespace sentry::kdd {

inline constexpr std::size_t kFeatureFields = 41;
inline constexpr std::size_t kNumericFields = 38;

/// Names of the 41 raw KDD'99 features in file order.
inline constexpr std::array<std::string_view, kFeatureFields> kRawFeatureNames = {
    "duration", "protocol_type", "service", "flag", "src_bytes", "dst_bytes", "land",
    "wrong_fragment", "urgent", "hot", "num_failed_logins", "logged_in", "num_compromised",
    "root_shell", "su_attempted", "num_root", "num_file_creations", "num_shells",
    "num_access_files", "num_outbound_cmds", "is_host_login", "is_guest_login", "count",
    "srv_count", "serror_rate", "srv_serror_rate", "rerror_rate", "srv_rerror_rate",
    "same_srv_rate", "diff_srv_rate", "srv_diff_host_rate", "dst_host_count",
    "dst_host_srv_count", "dst_host_same_srv_rate", "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate", "dst_host_srv_diff_host_rate", "dst_host_serror_rate",
    "dst_host_srv_serror_rate", "dst_host_rerror_rate", "dst_host_srv_rerror_rate"};

struct ConnectionRecord {
    std::string protocol;
    std::string service;
    std::string flag;
    /// duration followed by raw fields 4..40, in file order.
    std::array<double, kNumericFields> numeric{};
    std::string label;

    double duration() const { return numeric[0]; }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline double parse_number(std::string_view text, std::size_t field) {
    double value = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || text.empty() || !std::isfinite(value)) {
        throw NumericParseError("field " + std::to_string(field) + " (" +
                                std::string(kRawFeatureNames[field]) +
                                "): not a number: '" + std::string(text) + "'");
    }
    return value;
}

} // namespace detail

/// Strip one trailing period, the KDD'99 label convention.
inline std::string strip_label(std::string_view label) {
    label = detail::trim(label);
    if (!label.empty() && label.back() == '.') label.remove_suffix(1);
    return std::string(label);
}

/// Parse one comma-separated KDD'99 line (41 features + label).
inline ConnectionRecord parse_record(std::string_view line) {
    std::array<std::string_view, kFeatureFields + 1> fields{};
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        const auto piece = line.substr(start, comma == std::string_view::npos ? line.npos
                                                                            : comma - start);
        if (count < fields.size()) fields[count] = detail::trim(piece);
        ++count;
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (count != kFeatureFields + 1) {
        throw FieldCountError("expected 42 fields, found " + std::to_string(count));
    }

    ConnectionRecord rec;
    rec.protocol = std::string(fields[1]);
    rec.service = std::string(fields[2]);
    rec.flag = std::string(fields[3]);
    rec.numeric[0] = detail::parse_number(fields[0], 0);
    for (std::size_t f = 4; f < kFeatureFields; ++f) {
        rec.numeric[f - 3] = detail::parse_number(fields[f], f);
    }
    rec.label = strip_label(fields[kFeatureFields]);
    if (rec.label.empty()) throw FieldCountError("empty label field");
    return rec;
}

// ---------------------------------------------------------------------------
// Attack grouping

enum class AttackClass : std::uint8_t { Normal = 0, DoS, Probe, R2L, U2R };

inline constexpr std::array<AttackClass, 5> kAllAttackClasses = {
    AttackClass::Normal, AttackClass::DoS, AttackClass::Probe, AttackClass::R2L,
    AttackClass::U2R};

constexpr std::string_view to_string(AttackClass c) {
    switch (c) {
    case AttackClass::Normal: return "Normal";
    case AttackClass::DoS: return "DoS";
    case AttackClass::Probe: return "Probe";
    case AttackClass::R2L: return "R2L";
    case AttackClass::U2R: return "U2R";
    }
    return "?";
}

constexpr Verdict truth_of(AttackClass c) {
    return c == AttackClass::Normal ? Verdict::Normal : Verdict::Intrusive;
}

/// Label -> group map. table3() holds the sixteen example labels; the full
/// map adds every other label of the KDD'99 training and test files.
class LabelMap {
public:
    enum class Mode { Strict, Lenient };

    static LabelMap table3() {
        LabelMap m;
        m.add("normal", AttackClass::Normal);
        for (auto l : {"processtable", "mailbomb", "neptune", "teardrop"}) m.add(l, AttackClass::DoS);
        for (auto l : {"named", "xsnoop", "spy", "multihop"}) m.add(l, AttackClass::R2L);
        // The data files spell it "buffer_overflow"; kdd() maps both.
        for (auto l : {"ps", "xterm", "bufferoverflow", "perl"}) m.add(l, AttackClass::U2R);
        for (auto l : {"saint", "mscan", "portsweep", "ipsweep"}) m.add(l, AttackClass::Probe);
        return m;
    }

    static LabelMap kdd() {
        LabelMap m = table3();
        for (auto l : {"back", "land", "pod", "smurf", "apache2", "udpstorm"}) m.add(l, AttackClass::DoS);
        for (auto l : {"nmap", "satan"}) m.add(l, AttackClass::Probe);
        for (auto l : {"ftp_write", "guess_passwd", "imap", "phf", "warezclient", "warezmaster",
                       "sendmail", "snmpgetattack", "snmpguess", "xlock", "worm"})
            m.add(l, AttackClass::R2L);
        for (auto l : {"buffer_overflow", "loadmodule", "rootkit", "httptunnel", "sqlattack"})
            m.add(l, AttackClass::U2R);
        return m;
    }

    void add(std::string label, AttackClass group) { map_[std::move(label)] = group; }

    void set_mode(Mode mode, AttackClass fallback = AttackClass::DoS) {
        mode_ = mode;
        fallback_ = fallback;
    }
    Mode mode() const { return mode_; }

    bool contains(std::string_view label) const { return map_.count(std::string(label)) != 0; }

    AttackClass group(std::string_view label) const {
        auto it = map_.find(std::string(label));
        if (it != map_.end()) return it->second;
        if (mode_ == Mode::Lenient) return fallback_;
        throw UnknownLabelError("unknown attack label '" + std::string(label) + "'");
    }

    const std::map<std::string, AttackClass>& entries() const { return map_; }

private:
    std::map<std::string, AttackClass> map_;
    Mode mode_ = Mode::Strict;
    AttackClass fallback_ = AttackClass::DoS;
};

inline AttackClass group_attack(std::string_view label, const LabelMap& map = LabelMap::kdd()) {
    return map.group(label);
}

// ---------------------------------------------------------------------------
// Encoding

/// Protocol bits: tcp 001, icmp 010, udp 011.
inline constexpr std::array<std::pair<std::string_view, std::array<double, 3>>, 3> kProtocolCodes = {{
    {"tcp", {0.0, 0.0, 1.0}},
    {"icmp", {0.0, 1.0, 0.0}},
    {"udp", {0.0, 1.0, 1.0}},
}};

/// Encoded layout: duration, protocol_b0..b2, service, flag, then raw fields 4..40.
inline constexpr std::size_t kEncodedWidth = kNumericFields + 3 + 2;
inline constexpr std::size_t kProtocolColumn = 1;
inline constexpr std::size_t kServiceColumn = 4;
inline constexpr std::size_t kFlagColumn = 5;

inline std::vector<std::string> encoded_column_names() {
    std::vector<std::string> names;
    names.reserve(kEncodedWidth);
    names.emplace_back(kRawFeatureNames[0]);
    names.emplace_back("protocol_b0");
    names.emplace_back("protocol_b1");
    names.emplace_back("protocol_b2");
    names.emplace_back("service");
    names.emplace_back("flag");
    for (std::size_t f = 4; f < kFeatureFields; ++f) names.emplace_back(kRawFeatureNames[f]);
    return names;
}

/// Maps categorical values to numeric codes. Service and flag get an index by
/// descending training frequency (ties broken alphabetically).
class EncodingTable {
public:
    enum class Unknown { Strict, MapToUnseen };

    static EncodingTable build(std::span<const ConnectionRecord> records) {
        std::map<std::string, std::size_t> services, flags;
        for (const auto& r : records) {
            ++services[r.service];
            ++flags[r.flag];
        }
        EncodingTable t;
        t.services_ = rank(services);
        t.flags_ = rank(flags);
        return t;
    }

    std::size_t service_code(std::string_view s, Unknown mode = Unknown::Strict) const {
        return lookup(services_, s, "service", mode);
    }
    std::size_t flag_code(std::string_view s, Unknown mode = Unknown::Strict) const {
        return lookup(flags_, s, "flag", mode);
    }
    static std::array<double, 3> protocol_code(std::string_view p) {
        for (const auto& [name, code] : kProtocolCodes)
            if (name == p) return code;
        throw UnknownCategoryError("unknown protocol '" + std::string(p) + "'");
    }

    std::size_t service_count() const { return services_.size(); }
    std::size_t flag_count() const { return flags_.size(); }
    const std::vector<std::string>& services() const { return services_; }
    const std::vector<std::string>& flags() const { return flags_; }

private:
    static std::vector<std::string> rank(const std::map<std::string, std::size_t>& freq) {
        std::vector<std::pair<std::string, std::size_t>> items(freq.begin(), freq.end());
        std::stable_sort(items.begin(), items.end(),
                         [](const auto& a, const auto& b) { return a.second > b.second; });
        std::vector<std::string> out;
        out.reserve(items.size());
        for (auto& [name, _] : items) out.push_back(name);
        return out;
    }

    static std::size_t lookup(const std::vector<std::string>& values, std::string_view key,
                              const char* what, Unknown mode) {
        auto it = std::find(values.begin(), values.end(), key);
        if (it != values.end()) return static_cast<std::size_t>(it - values.begin());
        if (mode == Unknown::MapToUnseen) return values.size();
        throw UnknownCategoryError(std::string("unknown ") + what + " '" + std::string(key) + "'");
    }

    std::vector<std::string> services_;
    std::vector<std::string> flags_;
};

inline FeatureVector encode(const ConnectionRecord& r, const EncodingTable& table,
                            EncodingTable::Unknown mode = EncodingTable::Unknown::Strict) {
    FeatureVector v;
    v.reserve(kEncodedWidth);
    v.push_back(r.numeric[0]);
    const auto proto = EncodingTable::protocol_code(r.protocol);
    v.insert(v.end(), proto.begin(), proto.end());
    v.push_back(static_cast<double>(table.service_code(r.service, mode)));
    v.push_back(static_cast<double>(table.flag_code(r.flag, mode)));
    v.insert(v.end(), r.numeric.begin() + 1, r.numeric.end());
    return v;
}

/// Recover the protocol name from its three encoded columns.
inline std::string decode_protocol(std::span<const double> bits) {
    if (bits.size() != 3) throw DimensionMismatchError("protocol code needs 3 columns");
    for (const auto& [name, code] : kProtocolCodes) {
        if (std::equal(code.begin(), code.end(), bits.begin())) return std::string(name);
    }
    throw UnknownCategoryError("no protocol has this code");
}

// ---------------------------------------------------------------------------
// Datasets

struct Dataset {
    std::vector<FeatureVector> x;
    std::vector<AttackClass> group;

    std::size_t size() const { return x.size(); }
    bool empty() const { return x.empty(); }
    std::size_t dim() const { return x.empty() ? 0 : x.front().size(); }
    Verdict truth(std::size_t i) const { return truth_of(group[i]); }

    void push_back(FeatureVector v, AttackClass c) {
        if (!x.empty() && v.size() != dim())
            throw DimensionMismatchError("row width " + std::to_string(v.size()) +
                                         " differs from dataset width " + std::to_string(dim()));
        x.push_back(std::move(v));
        group.push_back(c);
    }

    std::size_t count(Verdict v) const {
        std::size_t n = 0;
        for (auto g : group) n += truth_of(g) == v;
        return n;
    }
};

struct MinMaxBounds {
    std::vector<double> lo;
    std::vector<double> hi;
    std::size_t dim() const { return lo.size(); }
};

inline MinMaxBounds fit_normalizer(const Dataset& train) {
    if (train.empty()) throw EmptyTrainingSetError("cannot fit normalizer on empty data");
    MinMaxBounds b{train.x.front(), train.x.front()};
    for (const auto& v : train.x) {
        if (v.size() != b.dim()) throw DimensionMismatchError("ragged dataset");
        for (std::size_t j = 0; j < v.size(); ++j) {
            b.lo[j] = std::min(b.lo[j], v[j]);
            b.hi[j] = std::max(b.hi[j], v[j]);
        }
    }
    return b;
}

/// (x - min)/(max - min), clamped to [0,1]; constant features map to 0.
inline FeatureVector apply_normalizer(const MinMaxBounds& b, std::span<const double> v) {
    if (v.size() != b.dim())
        throw DimensionMismatchError("vector width " + std::to_string(v.size()) +
                                     " != bounds width " + std::to_string(b.dim()));
    FeatureVector out(v.size());
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double range = b.hi[j] - b.lo[j];
        out[j] = range > 0.0 ? std::clamp((v[j] - b.lo[j]) / range, 0.0, 1.0) : 0.0;
    }
    return out;
}

inline Dataset apply_normalizer(const MinMaxBounds& b, const Dataset& d) {
    Dataset out;
    out.group = d.group;
    out.x.reserve(d.size());
    for (const auto& v : d.x) out.x.push_back(apply_normalizer(b, v));
    return out;
}

inline Dataset subset(const Dataset& d, std::span<const std::size_t> rows) {
    Dataset out;
    out.x.reserve(rows.size());
    out.group.reserve(rows.size());
    for (auto i : rows) {
        out.x.push_back(d.x[i]);
        out.group.push_back(d.group[i]);
    }
    return out;
}

/// Seeded shuffle; the first part receives floor(fraction * n) rows.
inline std::pair<Dataset, Dataset> sample_split(const Dataset& d, double fraction,
                                                std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction <= 1.0))
        throw std::invalid_argument("split fraction must lie in [0,1]");
    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    const auto cut = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(d.size())));
    return {subset(d, std::span(order).first(cut)), subset(d, std::span(order).subspan(cut))};
}

// ---------------------------------------------------------------------------
// Files

struct ParseReport {
    std::size_t lines = 0;
    std::size_t field_count_errors = 0;
    std::size_t numeric_errors = 0;
    std::size_t unknown_labels = 0;
    std::map<std::string, std::size_t> label_counts;
    std::map<std::string, std::size_t> unknown_label_counts;
};

/// Reads every non-blank line. With `skip_bad` malformed lines are counted
/// and skipped; otherwise the first one throws with its line number.
inline std::vector<ConnectionRecord> read_records(std::istream& in, ParseReport& report,
                                                  bool skip_bad = false) {
    std::vector<ConnectionRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::trim(line).empty()) continue;
        ++report.lines;
        try {
            out.push_back(parse_record(line));
            ++report.label_counts[out.back().label];
        } catch (const FieldCountError& e) {
            ++report.field_count_errors;
            if (!skip_bad) throw FieldCountError("line " + std::to_string(lineno) + ": " + e.what());
        } catch (const NumericParseError& e) {
            ++report.numeric_errors;
            if (!skip_bad) throw NumericParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<ConnectionRecord> read_records(const std::string& path, ParseReport& report,
                                                  bool skip_bad = false) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset '" + path + "'");
    return read_records(in, report, skip_bad);
}

/// Groups and encodes records. Unknown labels are counted in `report`; in
/// strict mode they are excluded from the result, in lenient mode they take
/// the map's fallback group.
inline Dataset to_dataset(std::span<const ConnectionRecord> records, const EncodingTable& table,
                          const LabelMap& labels, ParseReport& report,
                          EncodingTable::Unknown mode = EncodingTable::Unknown::Strict) {
    Dataset d;
    d.x.reserve(records.size());
    d.group.reserve(records.size());
    for (const auto& r : records) {
        if (!labels.contains(r.label)) {
            ++report.unknown_labels;
            ++report.unknown_label_counts[r.label];
            if (labels.mode() == LabelMap::Mode::Strict) continue;
        }
        d.push_back(encode(r, table, mode), labels.group(r.label));
    }
    return d;
}

/// Columnar CSV cache: one header line naming every encoded column.
inline void write_encoded_csv(std::ostream& out, const Dataset& d) {
    const auto names = encoded_column_names();
    for (const auto& n : names) out << n << ',';
    out << "attack_class,truth\n";
    char buf[32];
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (double v : d.x[i]) {
            auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
            out.write(buf, p - buf);
            out << ',';
        }
        out << to_string(d.group[i]) << ',' << static_cast<int>(d.truth(i)) << '\n';
    }
}

} // namespace sentry::kdd
