#include <iostream>
#include <string>
#include <vector>

#include "xdcc/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return xdcc::cli::run(args, std::cout, std::cerr);
}
