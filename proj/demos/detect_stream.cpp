// End-to-end run on a synthetic KDD-style corpus: ingest, train a Q-learning
// detector, stream the test split through the cluster heads and score it.

#include <iostream>

#include "sentry/bench.hpp"
#include "sentry/synth.hpp"

int main() {
    using namespace sentry;
    bench::Corpus corpus;
    corpus.train = synth::make_records(synth::Split::Train, 20000, 1);
    corpus.test = synth::make_records(synth::Split::Test, 10000, 2);

    const auto cfg = config::parse_config("", std::vector<std::string>{"--detector", "ql", "--runs", "1",
                                                                       "--train_fraction", "0.5", "--test_fraction", "0.5"});
    const auto r = bench::run_once(corpus, cfg, cfg.detector, 0);
    std::cout << "train " << r.train_rows << " rows, test " << r.test_rows << " rows\n";
    std::cout << metrics::to_json(r.report).dump(2) << '\n';
    for (const auto& [group, g] : r.groups)
        std::cout << kdd::to_string(group) << ": flagged " << g.flagged << " of " << g.rows << '\n';
}
