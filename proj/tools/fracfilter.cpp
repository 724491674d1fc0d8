#include <iostream>
#include <string>
#include <vector>

#include "fracfilter/app.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv + 1, argv + argc);
    return fracfilter::app::main_entry(args, std::cout, std::cerr);
}
