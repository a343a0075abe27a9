#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
    return qlink::cli::run_command({argv, argv + argc}, std::cout, std::cerr);
}
