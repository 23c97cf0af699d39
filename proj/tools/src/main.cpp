#include <iostream>

#include "rnnp_cli/cli.hpp"

int main(int argc, char** argv) {
    const int code = rnnp::cli::run(argc, argv, std::cout, std::cerr);
    std::cout.flush();
    return code;
}
