#include <iostream>
#include <string>
#include <vector>

#include "oqp/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return oqp::run_cli(args, std::cout, std::cerr);
}
