#include <iostream>

#include "mvw/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return mvw::runCli(args, std::cout, std::cerr);
}
