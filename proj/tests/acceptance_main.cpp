#include <iostream>
#include <string>

#include "cqi/acceptance.hpp"

int main(int argc, char** argv)
{
    cqi::acceptance::Options opts;
    opts.progress = &std::cerr;
    for (int i = 1; i < argc; ++i)
        if (std::string(argv[i]) == "--quick") opts.quick = true;
    const auto results = cqi::acceptance::run(opts);
    std::cout << cqi::acceptance::render(results);
    return cqi::acceptance::all_passed(results) ? 0 : 1;
}
