#include "dualobs/parallel.hpp"

#include <cstdlib>
#include <string>

namespace dualobs {

std::size_t default_workers()
{
    if (const char* env = std::getenv("DUALOBS_WORKERS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<std::size_t>(v);
        } catch (...) {
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace dualobs
