#include <vector>

#include "avdb/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return avdb::cli::run(args);
}
