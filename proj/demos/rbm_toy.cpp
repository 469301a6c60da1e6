// Trains a 4x3 RBM with CD-1 on two repeating patterns and shows how the
// exact model probability of each pattern changes.

#include <iomanip>
#include <iostream>
#include <vector>

#include "sentry/rbm.hpp"

int main() {
    using namespace sentry;
    std::vector<FeatureVector> data;
    for (int i = 0; i < 200; ++i) data.push_back(i % 2 ? FeatureVector{1, 1, 0, 0} : FeatureVector{0, 0, 1, 1});

    rbm::CdParams p;
    p.hidden = 3;
    p.batch = 10;
    p.epochs = 0;
    const auto before = rbm::exhaustive_distribution(rbm::cd1_train_layer(data, p));
    p.epochs = 200;
    p.learning_rate = 0.1;
    const auto after = rbm::exhaustive_distribution(rbm::cd1_train_layer(data, p));

    std::cout << std::fixed << std::setprecision(4);
    for (std::uint64_t v : {0b0011ULL, 0b1100ULL, 0b0101ULL})
        std::cout << "P(v=" << (v >> 3 & 1) << (v >> 2 & 1) << (v >> 1 & 1) << (v & 1) << ") "
                  << before.p_visible[v] << " -> " << after.p_visible[v] << '\n';
}
