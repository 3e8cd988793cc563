#include <iostream>

#include "drain/cli/commands.hpp"

int main(int argc, char** argv)
{
    return drain::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
