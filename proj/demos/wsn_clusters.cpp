// Elects cluster heads for a synthetic 20-node field and prints each
// cluster with its aggregated head trust.

#include <iomanip>
#include <iostream>

#include "sentry/topology.hpp"

int main() {
    using namespace sentry;
    const auto topo = wsn::build_topology(20, 4, 42);
    std::cout << std::fixed << std::setprecision(3);
    for (std::size_t k = 0; k < topo.assignment.clusters.size(); ++k) {
        const auto& c = topo.assignment.clusters[k];
        std::cout << "cluster " << k << ": head " << c.head << " trust " << topo.head_trust[k] << ", members";
        for (int m : c.members) std::cout << ' ' << m;
        std::cout << '\n';
    }
}
