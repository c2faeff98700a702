#include "incnet/parallel.hpp"

#include <cstdlib>
#include <string>

namespace incnet {

int default_worker_count() {
    if (const char* env = std::getenv("INCENTIVE_NET_WORKERS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace incnet
