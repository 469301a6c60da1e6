#pragma once

// Seeded generator of KDD'99-format connection records.
//
// Each label has a traffic signature modeled on the public description of
// the corresponding attack (protocol, service, flag, byte counts, traffic
// window statistics). The label mix follows the published class counts of
// the 10% training file and of the labeled test file; the test mix includes
// attack types absent from training. Used when the real files are not
// available, and for fixtures.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sentry/kdd.hpp"

namespace sentry::synth {

/// Position of a raw feature inside ConnectionRecord::numeric.
consteval std::size_t num(std::string_view name) {
    for (std::size_t f = 0; f < kdd::kFeatureFields; ++f) {
        if (kdd::kRawFeatureNames[f] == name) {
            if (f == 0) return 0;
            if (f >= 4) return f - 3;
        }
    }
    throw "not a numeric KDD feature";
}

/// Raw fields printed with two decimals.
constexpr bool is_rate_field(std::size_t raw) {
    return (raw >= 24 && raw <= 30) || (raw >= 33 && raw <= 40);
}

inline std::string format_record(const kdd::ConnectionRecord& r) {
    std::string line;
    line.reserve(160);
    char buf[48];
    for (std::size_t f = 0; f < kdd::kFeatureFields; ++f) {
        if (f == 1) {
            line += r.protocol;
        } else if (f == 2) {
            line += r.service;
        } else if (f == 3) {
            line += r.flag;
        } else {
            const double v = r.numeric[f == 0 ? 0 : f - 3];
            if (is_rate_field(f))
                std::snprintf(buf, sizeof buf, "%.2f", v);
            else
                std::snprintf(buf, sizeof buf, "%.0f", v);
            line += buf;
        }
        line += ',';
    }
    line += r.label;
    line += '.';
    return line;
}

enum class Split { Train, Test };

/// Published per-label row counts used as sampling weights.
inline const std::vector<std::pair<std::string, double>>& label_mix(Split split) {
    static const std::vector<std::pair<std::string, double>> train = {
        {"smurf", 280790}, {"neptune", 107201}, {"normal", 97278}, {"back", 2203},
        {"satan", 1589},   {"ipsweep", 1247},   {"portsweep", 1040}, {"warezclient", 1020},
        {"teardrop", 979}, {"pod", 264},        {"nmap", 231},       {"guess_passwd", 53},
        {"buffer_overflow", 30}, {"land", 21},  {"warezmaster", 20}, {"imap", 12},
        {"rootkit", 10},   {"loadmodule", 9},   {"ftp_write", 8},    {"multihop", 7},
        {"phf", 4},        {"perl", 3},         {"spy", 2}};
    static const std::vector<std::pair<std::string, double>> test = {
        {"smurf", 164091}, {"normal", 60593}, {"neptune", 58001}, {"snmpgetattack", 7741},
        {"mailbomb", 5000}, {"guess_passwd", 4367}, {"snmpguess", 2406}, {"satan", 1633},
        {"warezmaster", 1602}, {"back", 1098}, {"mscan", 1053}, {"apache2", 794},
        {"processtable", 759}, {"saint", 736}, {"portsweep", 354}, {"ipsweep", 306},
        {"httptunnel", 158}, {"pod", 87}, {"nmap", 84}, {"buffer_overflow", 22},
        {"multihop", 18}, {"named", 17}, {"sendmail", 17}, {"ps", 16}, {"xterm", 13},
        {"rootkit", 13}, {"teardrop", 12}, {"xlock", 9}, {"land", 9}, {"xsnoop", 4},
        {"ftp_write", 3}, {"worm", 2}, {"loadmodule", 2}, {"perl", 2}, {"sqlattack", 2},
        {"udpstorm", 2}, {"phf", 2}, {"imap", 1}};
    return split == Split::Train ? train : test;
}

inline constexpr std::size_t kTrainRows = 494021;
inline constexpr std::size_t kTestRows = 311029;

class Generator {
public:
    explicit Generator(std::uint64_t seed, Split split = Split::Train) : rng_(seed), split_(split) {
        const auto& mix = label_mix(split);
        std::vector<double> w;
        for (const auto& [label, count] : mix) {
            labels_.push_back(label);
            w.push_back(count);
        }
        pick_label_ = std::discrete_distribution<std::size_t>(w.begin(), w.end());
    }

    kdd::ConnectionRecord next() { return make(labels_[pick_label_(rng_)]); }

    kdd::ConnectionRecord make(const std::string& label) {
        kdd::ConnectionRecord r;
        r.label = label;
        if (label == "normal") normal(r);
        else if (label == "smurf") smurf(r);
        else if (label == "neptune") neptune(r);
        else if (label == "back") back(r);
        else if (label == "satan" || label == "saint") satan(r, label == "saint");
        else if (label == "ipsweep") ipsweep(r);
        else if (label == "portsweep") portsweep(r);
        else if (label == "nmap") nmap(r);
        else if (label == "mscan") mscan(r);
        else if (label == "teardrop") teardrop(r);
        else if (label == "pod") pod(r);
        else if (label == "land") land(r);
        else if (label == "mailbomb") mailbomb(r);
        else if (label == "processtable") processtable(r);
        else if (label == "apache2") apache2(r);
        else if (label == "udpstorm") udpstorm(r);
        else if (label == "snmpgetattack") snmpgetattack(r);
        else if (label == "snmpguess") snmpguess(r);
        else if (label == "guess_passwd") guess_passwd(r);
        else if (label == "warezclient") warez(r, false);
        else if (label == "warezmaster") warez(r, true);
        else host_attack(r, label);
        return r;
    }

    void write(std::ostream& out, std::size_t rows) {
        for (std::size_t i = 0; i < rows; ++i) out << format_record(next()) << '\n';
    }

private:
    using Rec = kdd::ConnectionRecord;

    double U(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
    double I(long a, long b) { return static_cast<double>(std::uniform_int_distribution<long>(a, b)(rng_)); }
    double rate(double a, double b) { return std::round(std::clamp(U(a, b), 0.0, 1.0) * 100.0) / 100.0; }
    double logn(double mu, double sigma) { return std::round(std::lognormal_distribution<double>(mu, sigma)(rng_)); }
    bool chance(double p) { return U(0.0, 1.0) < p; }
    template <class T>
    const T& one_of(std::initializer_list<T> items) {
        const auto i = std::uniform_int_distribution<std::size_t>(0, items.size() - 1)(rng_);
        return *(items.begin() + i);
    }
    std::string choose(std::initializer_list<const char*> items) { return one_of(items); }

    static double& at(Rec& r, std::size_t i) { return r.numeric[i]; }

    /// Window statistics for traffic aimed at one host/service.
    void window(Rec& r, double count, double srv_count, double same_srv, double diff_srv,
                double dh_count, double dh_srv, double dh_same, double dh_diff, double dh_src_port,
                double dh_srv_diff) {
        at(r, num("count")) = count;
        at(r, num("srv_count")) = srv_count;
        at(r, num("same_srv_rate")) = same_srv;
        at(r, num("diff_srv_rate")) = diff_srv;
        at(r, num("dst_host_count")) = dh_count;
        at(r, num("dst_host_srv_count")) = dh_srv;
        at(r, num("dst_host_same_srv_rate")) = dh_same;
        at(r, num("dst_host_diff_srv_rate")) = dh_diff;
        at(r, num("dst_host_same_src_port_rate")) = dh_src_port;
        at(r, num("dst_host_srv_diff_host_rate")) = dh_srv_diff;
    }

    void serrors(Rec& r, double v) {
        for (auto f : {num("serror_rate"), num("srv_serror_rate"), num("dst_host_serror_rate"),
                       num("dst_host_srv_serror_rate")})
            at(r, f) = v;
    }
    void rerrors(Rec& r, double v) {
        for (auto f : {num("rerror_rate"), num("srv_rerror_rate"), num("dst_host_rerror_rate"),
                       num("dst_host_srv_rerror_rate")})
            at(r, f) = v;
    }

    void normal(Rec& r) {
        const double kind = U(0.0, 1.0);
        if (kind < 0.60) {
            r.protocol = "tcp"; r.service = "http"; r.flag = "SF";
            at(r, num("duration")) = chance(0.95) ? 0 : I(1, 5);
            at(r, num("src_bytes")) = std::clamp(logn(5.4, 0.5), 100.0, 2000.0);
            at(r, num("dst_bytes")) = logn(7.6, 1.0);
            at(r, num("logged_in")) = 1;
            const double c = I(1, 40);
            window(r, c, c + I(0, 10), 1.0, 0.0, I(1, 255), I(50, 255), rate(0.8, 1.0), rate(0.0, 0.02),
                   rate(0.0, 0.1), rate(0.0, 0.05));
            at(r, num("srv_diff_host_rate")) = rate(0.0, 0.3);
        } else if (kind < 0.70) {
            r.protocol = "tcp"; r.service = "smtp"; r.flag = "SF";
            at(r, num("duration")) = I(0, 3);
            at(r, num("src_bytes")) = logn(7.0, 0.8);
            at(r, num("dst_bytes")) = logn(5.8, 0.3);
            at(r, num("logged_in")) = 1;
            window(r, I(1, 5), I(1, 5), 1.0, 0.0, I(100, 255), I(50, 255), rate(0.3, 1.0), rate(0.0, 0.05),
                   rate(0.0, 0.05), rate(0.0, 0.05));
        } else if (kind < 0.77) {
            r.protocol = "tcp"; r.service = "ftp_data"; r.flag = "SF";
            at(r, num("src_bytes")) = logn(7.5, 1.5);
            at(r, num("logged_in")) = 1;
            window(r, I(1, 10), I(1, 10), 1.0, 0.0, I(1, 255), I(1, 100), rate(0.2, 1.0), rate(0.0, 0.1),
                   rate(0.3, 1.0), rate(0.0, 0.05));
        } else if (kind < 0.83) {
            r.protocol = "udp"; r.service = "domain_u"; r.flag = "SF";
            at(r, num("src_bytes")) = I(28, 50);
            at(r, num("dst_bytes")) = I(60, 150);
            const double c = I(50, 200);
            window(r, c, c, 1.0, 0.0, 255, 255, 1.0, 0.0, rate(0.0, 0.02), 0.0);
        } else if (kind < 0.89) {
            r.protocol = "udp"; r.service = "private"; r.flag = "SF";
            at(r, num("src_bytes")) = I(100, 110);
            at(r, num("dst_bytes")) = I(100, 110);
            const double c = I(1, 200);
            window(r, c, c, 1.0, 0.0, 255, I(200, 255), rate(0.8, 1.0), rate(0.0, 0.02), rate(0.0, 0.02), 0.0);
        } else if (kind < 0.92) {
            r.protocol = "icmp"; r.service = choose({"ecr_i", "eco_i", "urp_i"}); r.flag = "SF";
            at(r, num("src_bytes")) = I(8, 64);
            window(r, I(1, 5), I(1, 5), 1.0, 0.0, I(1, 100), I(1, 50), rate(0.3, 1.0), rate(0.0, 0.2),
                   rate(0.0, 0.5), rate(0.0, 0.2));
        } else if (kind < 0.96) {
            r.protocol = "tcp"; r.service = choose({"ftp", "telnet"}); r.flag = "SF";
            at(r, num("duration")) = I(1, 3000);
            at(r, num("src_bytes")) = logn(5.5, 0.8);
            at(r, num("dst_bytes")) = logn(7.5, 1.2);
            at(r, num("logged_in")) = 1;
            at(r, num("hot")) = chance(0.3) ? I(1, 4) : 0;
            at(r, num("num_file_creations")) = chance(0.1) ? I(1, 2) : 0;
            at(r, num("num_access_files")) = chance(0.05) ? 1 : 0;
            window(r, I(1, 3), I(1, 3), 1.0, 0.0, I(1, 100), I(1, 40), rate(0.1, 1.0), rate(0.0, 0.1),
                   rate(0.0, 0.2), rate(0.0, 0.05));
        } else if (kind < 0.99) {
            r.protocol = "tcp"; r.service = choose({"finger", "auth", "pop_3", "X11", "domain", "IRC"});
            r.flag = "SF";
            at(r, num("duration")) = I(0, 10);
            at(r, num("src_bytes")) = logn(4.0, 0.8);
            at(r, num("dst_bytes")) = logn(6.0, 1.0);
            at(r, num("logged_in")) = chance(0.7) ? 1 : 0;
            window(r, I(1, 10), I(1, 10), 1.0, 0.0, I(1, 255), I(1, 50), rate(0.1, 1.0), rate(0.0, 0.1),
                   rate(0.0, 0.3), rate(0.0, 0.05));
        } else {
            // occasional failed connection
            r.protocol = "tcp"; r.service = choose({"http", "private", "smtp"}); r.flag = choose({"REJ", "S0", "RSTO"});
            window(r, I(1, 20), I(1, 20), rate(0.5, 1.0), rate(0.0, 0.1), I(1, 255), I(1, 100), rate(0.2, 1.0),
                   rate(0.0, 0.1), rate(0.0, 0.2), 0.0);
            if (r.flag == "S0") serrors(r, rate(0.3, 1.0)); else rerrors(r, rate(0.3, 1.0));
        }
    }

    void smurf(Rec& r) {
        r.protocol = "icmp"; r.service = "ecr_i"; r.flag = "SF";
        at(r, num("src_bytes")) = chance(0.85) ? 1032 : 520;
        const double c = chance(0.95) ? 511 : I(100, 510);
        window(r, c, c, 1.0, 0.0, 255, 255, 1.0, 0.0, rate(0.9, 1.0), 0.0);
    }

    void neptune(Rec& r) {
        r.protocol = "tcp";
        r.service = chance(0.6) ? "private" : choose({"http", "telnet", "ftp_data", "smtp", "finger", "domain", "imap4", "uucp"});
        const bool rej = chance(0.1);
        r.flag = rej ? "REJ" : "S0";
        const double c = I(100, 511);
        window(r, c, I(1, 30), rate(0.0, 0.1), rate(0.04, 0.08), 255, I(1, 30), rate(0.0, 0.1), rate(0.04, 0.1),
               0.0, 0.0);
        if (rej) rerrors(r, 1.0); else serrors(r, 1.0);
    }

    void back(Rec& r) {
        r.protocol = "tcp"; r.service = "http"; r.flag = chance(0.9) ? "SF" : "RSTR";
        at(r, num("duration")) = I(0, 2);
        at(r, num("src_bytes")) = 54540;
        at(r, num("dst_bytes")) = chance(0.7) ? 8314 : I(7000, 8400);
        at(r, num("hot")) = 2;
        at(r, num("logged_in")) = 1;
        at(r, num("num_compromised")) = 1;
        window(r, I(1, 10), I(1, 10), 1.0, 0.0, I(100, 255), I(100, 255), 1.0, 0.0, rate(0.0, 0.05), 0.0);
    }

    void satan(Rec& r, bool saint) {
        r.protocol = chance(0.9) ? "tcp" : "udp";
        r.service = choose({"private", "other", "finger", "telnet", "ftp", "smtp", "sunrpc", "netbios_ns", "link"});
        r.flag = choose({"REJ", "S0", "RSTO", "SF", "RSTR"});
        const double c = I(1, saint ? 30 : 10);
        window(r, c, I(1, 3), rate(0.0, 0.3), rate(0.5, 1.0), 255, I(1, 10), rate(0.0, 0.05), rate(0.5, 1.0),
               rate(0.0, 0.2), 0.0);
        if (r.flag == "S0") serrors(r, rate(0.5, 1.0)); else rerrors(r, rate(0.5, 1.0));
    }

    void ipsweep(Rec& r) {
        r.protocol = "icmp"; r.service = chance(0.9) ? "eco_i" : "ecr_i"; r.flag = "SF";
        at(r, num("src_bytes")) = chance(0.8) ? 8 : 18;
        window(r, I(1, 2), I(1, 40), 1.0, 0.0, I(1, 100), I(1, 100), 1.0, 0.0, 1.0, rate(0.3, 1.0));
        at(r, num("srv_diff_host_rate")) = 1.0;
    }

    void portsweep(Rec& r) {
        r.protocol = "tcp"; r.service = choose({"private", "other", "ftp_data", "http", "telnet"});
        r.flag = choose({"REJ", "RSTR", "RSTOS0", "SH"});
        at(r, num("duration")) = chance(0.3) ? I(1000, 40000) : 0;
        window(r, I(1, 3), I(1, 3), rate(0.5, 1.0), 0.0, I(1, 20), I(1, 20), rate(0.5, 1.0), rate(0.0, 0.2),
               1.0, rate(0.0, 0.5));
        rerrors(r, rate(0.5, 1.0));
    }

    void nmap(Rec& r) {
        r.protocol = choose({"tcp", "udp", "icmp"});
        r.service = r.protocol == "icmp" ? "eco_i" : "private";
        r.flag = r.protocol == "tcp" ? choose({"SH", "S0", "RSTR"}) : "SF";
        at(r, num("src_bytes")) = r.protocol == "tcp" ? 0 : I(1, 20);
        window(r, I(1, 5), I(1, 5), rate(0.5, 1.0), rate(0.0, 0.5), I(1, 30), I(1, 30), rate(0.5, 1.0),
               rate(0.0, 0.5), rate(0.5, 1.0), rate(0.3, 1.0));
        if (r.flag == "S0" || r.flag == "SH") serrors(r, rate(0.5, 1.0));
    }

    void mscan(Rec& r) {
        r.protocol = "tcp";
        r.service = choose({"private", "http", "ftp", "telnet", "smtp", "imap4", "sunrpc", "domain", "pop_3", "finger"});
        r.flag = choose({"REJ", "S0", "SF", "RSTR"});
        window(r, I(1, 20), I(1, 5), rate(0.0, 0.3), rate(0.5, 1.0), 255, I(1, 20), rate(0.0, 0.1),
               rate(0.5, 1.0), rate(0.0, 0.1), rate(0.0, 0.2));
        if (r.flag == "S0") serrors(r, rate(0.3, 1.0)); else rerrors(r, rate(0.3, 1.0));
    }

    void teardrop(Rec& r) {
        r.protocol = "udp"; r.service = "private"; r.flag = "SF";
        at(r, num("src_bytes")) = 28;
        at(r, num("wrong_fragment")) = 3;
        window(r, I(1, 60), I(1, 60), 1.0, 0.0, I(1, 255), I(1, 100), rate(0.1, 1.0), rate(0.0, 0.1),
               rate(0.5, 1.0), 0.0);
    }

    void pod(Rec& r) {
        r.protocol = "icmp"; r.service = "ecr_i"; r.flag = "SF";
        at(r, num("src_bytes")) = 1480;
        at(r, num("wrong_fragment")) = 1;
        window(r, I(1, 10), I(1, 10), 1.0, 0.0, I(1, 255), I(1, 255), 1.0, 0.0, rate(0.5, 1.0), 0.0);
    }

    void land(Rec& r) {
        r.protocol = "tcp"; r.service = choose({"finger", "telnet", "http"}); r.flag = "S0";
        at(r, num("land")) = 1;
        window(r, 1, 1, 1.0, 0.0, I(1, 255), I(1, 10), rate(0.0, 1.0), 0.0, 1.0, 0.0);
        serrors(r, 1.0);
    }

    void mailbomb(Rec& r) {
        r.protocol = "tcp"; r.service = "smtp"; r.flag = "SF";
        at(r, num("src_bytes")) = I(900, 1300);
        at(r, num("dst_bytes")) = I(300, 400);
        at(r, num("logged_in")) = 1;
        const double c = I(100, 300);
        window(r, c, c, 1.0, 0.0, 255, 255, 1.0, 0.0, rate(0.0, 0.02), 0.0);
    }

    void processtable(Rec& r) {
        r.protocol = "tcp"; r.service = choose({"finger", "http", "smtp", "private"}); r.flag = "SF";
        at(r, num("duration")) = I(1000, 6000);
        at(r, num("dst_bytes")) = I(0, 20);
        window(r, I(1, 10), I(1, 10), 1.0, 0.0, 255, I(50, 255), rate(0.3, 1.0), rate(0.0, 0.05), 0.0, 0.0);
    }

    void apache2(Rec& r) {
        r.protocol = "tcp"; r.service = "http"; r.flag = choose({"RSTR", "S3", "SF"});
        at(r, num("src_bytes")) = I(0, 500);
        at(r, num("dst_bytes")) = I(0, 1000);
        at(r, num("hot")) = I(0, 2);
        at(r, num("logged_in")) = 1;
        window(r, I(100, 300), I(100, 300), 1.0, 0.0, 255, 255, 1.0, 0.0, 0.0, 0.0);
        rerrors(r, rate(0.0, 0.6));
    }

    void udpstorm(Rec& r) {
        r.protocol = "udp"; r.service = "private"; r.flag = "SF";
        at(r, num("src_bytes")) = I(1000, 1500);
        window(r, 511, 511, 1.0, 0.0, 255, 255, 1.0, 0.0, 1.0, 0.0);
    }

    void snmpgetattack(Rec& r) {
        r.protocol = "udp"; r.service = "private"; r.flag = "SF";
        at(r, num("src_bytes")) = I(100, 110);
        at(r, num("dst_bytes")) = I(100, 110);
        const double c = I(150, 511);
        window(r, c, c, 1.0, 0.0, 255, 255, 1.0, 0.0, rate(0.0, 0.02), 0.0);
    }

    void snmpguess(Rec& r) {
        r.protocol = "udp"; r.service = "private"; r.flag = "SF";
        at(r, num("src_bytes")) = I(29, 40);
        window(r, I(1, 5), I(1, 5), 1.0, 0.0, 255, I(1, 3), rate(0.0, 0.02), rate(0.0, 0.02), 0.0, 0.0);
    }

    void guess_passwd(Rec& r) {
        r.protocol = "tcp"; r.service = chance(0.9) ? "telnet" : choose({"pop_3", "imap4", "ftp"});
        r.flag = chance(0.7) ? "RSTO" : "SF";
        at(r, num("duration")) = I(1, 5);
        at(r, num("src_bytes")) = I(100, 130);
        at(r, num("dst_bytes")) = I(170, 190);
        at(r, num("num_failed_logins")) = 1;
        at(r, num("hot")) = chance(0.5) ? 0 : 1;
        window(r, I(1, 3), I(1, 3), 1.0, 0.0, I(1, 255), I(1, 255), rate(0.5, 1.0), 0.0, rate(0.0, 0.1), 0.0);
        rerrors(r, rate(0.0, 0.5));
    }

    void warez(Rec& r, bool master) {
        r.protocol = "tcp"; r.service = master ? "ftp" : "ftp_data"; r.flag = "SF";
        at(r, num("duration")) = master ? I(200, 2000) : I(0, 300);
        at(r, num("src_bytes")) = master ? logn(6.0, 0.5) : logn(9.0, 1.5);
        at(r, num("dst_bytes")) = master ? logn(12.0, 1.5) : 0;
        at(r, num("hot")) = master ? I(20, 30) : I(20, 28);
        at(r, num("logged_in")) = 1;
        at(r, num("is_guest_login")) = 1;
        window(r, I(1, 3), I(1, 3), 1.0, 0.0, I(1, 50), I(1, 50), rate(0.5, 1.0), 0.0, rate(0.0, 0.5), 0.0);
    }

    /// Interactive sessions (R2L and U2R) leaving host-level traces.
    void host_attack(Rec& r, const std::string& label) {
        r.protocol = label == "named" || label == "sqlattack" ? one_of({std::string("tcp"), std::string("udp")})
                                                                 : std::string("tcp");
        if (label == "phf" || label == "httptunnel") r.service = "http";
        else if (label == "imap") r.service = "imap4";
        else if (label == "ftp_write" || label == "xlock") r.service = "ftp";
        else if (label == "sendmail") r.service = "smtp";
        else if (label == "named") r.service = "domain";
        else if (label == "xterm" || label == "xsnoop") r.service = "X11";
        else r.service = "telnet";
        if (r.protocol == "udp") r.service = "private";
        r.flag = chance(0.8) ? "SF" : choose({"RSTO", "SH", "S1"});
        at(r, num("duration")) = I(10, 5000);
        at(r, num("src_bytes")) = logn(7.0, 1.2);
        at(r, num("dst_bytes")) = logn(8.0, 1.5);
        at(r, num("logged_in")) = 1;
        at(r, num("hot")) = I(1, 6);
        const bool u2r = label == "buffer_overflow" || label == "rootkit" || label == "loadmodule" ||
                         label == "perl" || label == "ps" || label == "xterm" || label == "sqlattack" ||
                         label == "httptunnel";
        if (u2r) {
            at(r, num("root_shell")) = chance(0.7) ? 1 : 0;
            at(r, num("num_file_creations")) = I(1, 5);
            at(r, num("num_shells")) = chance(0.5) ? 1 : 0;
            at(r, num("num_root")) = I(0, 5);
            at(r, num("num_compromised")) = I(1, 5);
        } else {
            at(r, num("num_access_files")) = chance(0.5) ? 1 : 0;
            at(r, num("num_compromised")) = I(0, 2);
            at(r, num("num_file_creations")) = chance(0.5) ? I(1, 3) : 0;
            at(r, num("is_guest_login")) = label == "ftp_write" ? 1 : 0;
        }
        window(r, I(1, 3), I(1, 3), 1.0, 0.0, I(1, 30), I(1, 30), rate(0.3, 1.0), rate(0.0, 0.1),
               rate(0.0, 0.5), rate(0.0, 0.2));
    }

    std::mt19937_64 rng_;
    Split split_;
    std::vector<std::string> labels_;
    std::discrete_distribution<std::size_t> pick_label_;
};

/// Writes `rows` surrogate lines.
inline void write_corpus(std::ostream& out, Split split, std::size_t rows, std::uint64_t seed) {
    Generator g(seed, split);
    g.write(out, rows);
}

inline std::vector<kdd::ConnectionRecord> make_records(Split split, std::size_t rows, std::uint64_t seed) {
    Generator g(seed, split);
    std::vector<kdd::ConnectionRecord> out;
    out.reserve(rows);
    for (std::size_t i = 0; i < rows; ++i) out.push_back(g.next());
    return out;
}

} // namespace sentry::synth
