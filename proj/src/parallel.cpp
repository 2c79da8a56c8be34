#include "defectscan/parallel.hpp"

#include <cstdlib>
#include <string>

namespace defectscan {

int default_workers() {
    if (const char* env = std::getenv("DEFECTSCAN_WORKERS")) {
        try {
            const int w = std::stoi(env);
            if (w >= 1) return w;
        } catch (const std::exception&) {
            // fall through to hardware default
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace defectscan
