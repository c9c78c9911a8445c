#include <vector>

#include "factprobe/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return factprobe::cli::run(args);
}
