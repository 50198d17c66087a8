#include "areacfd/service/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return areacfd::service::run_cli(args, std::cin, std::cout, std::cerr);
}
