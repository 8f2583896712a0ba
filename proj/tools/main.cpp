#include <iostream>
#include <string>
#include <vector>

#include "argrecon/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return argrecon::run_cli(args, std::cout, std::cerr);
}
