#include "pseudoq/parallel.hpp"

#include <cstdlib>
#include <string>

namespace pseudoq {

unsigned default_thread_count() {
    if (const char* env = std::getenv("PSEUDOQ_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n > 0) return static_cast<unsigned>(n);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace pseudoq
