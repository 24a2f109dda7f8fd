#include <iostream>

#include "sek/cli.hpp"

int main(int argc, char** argv) {
  return sek::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
