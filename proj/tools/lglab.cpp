#include <iostream>
#include <string>
#include <vector>

#include "lglab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return lglab::run_cli(args, std::cout, std::cerr);
}
