#include "lsr/log.hpp"

#include <cstdio>

namespace lsr::log {

bool& quiet() {
    static bool q = false;
    return q;
}

void info(const std::string& msg) {
    if (quiet()) return;
    std::fprintf(stderr, "[info] %s\n", msg.c_str());
}

void warn(const std::string& msg) {
    std::fprintf(stderr, "[warn] %s\n", msg.c_str());
}

}  // namespace lsr::log
