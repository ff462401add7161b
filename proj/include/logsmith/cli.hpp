#pragma once

// Command-line entry points. Filled in as the toolkit modules land; the
// binary always exists so packaging stays stable.

#include <cstdio>

namespace logsmith::cli {

inline int run(int argc, char** argv) {
    (void)argc;
    (void)argv;
    std::fprintf(stderr, "usage: logsmith <analyze|strip|run|evaluate> [options]\n");
    return 2;
}

}  // namespace logsmith::cli
