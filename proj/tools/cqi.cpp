#include <iostream>

#include "cqi/cli.hpp"

int main(int argc, char** argv)
{
    return cqi::cli::run(argc, argv, std::cout, std::cerr);
}
