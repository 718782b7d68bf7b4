#include <iostream>

#include "chanauth/cli.hpp"

int main(int argc, char** argv) {
    return chanauth::cli::cli_main(argc, argv, std::cout, std::cerr);
}
