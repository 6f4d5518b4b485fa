#include <iostream>

#include "optiring/cli.h"

int main(int argc, char** argv) {
    return optiring::cli::run(argc, argv, std::cout, std::cerr);
}
