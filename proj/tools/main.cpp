#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cli.hpp"

int main(int argc, char** argv) {
   const std::vector<std::string> args(argv + 1, argv + argc);
   const bool color = std::getenv("NO_COLOR") == nullptr && isatty(STDERR_FILENO) != 0;
   return cli::execute(args, std::cout, std::cerr, color);
}
