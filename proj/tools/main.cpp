#include <iostream>

#include "regcheck/cli.hpp"

int main(int argc, char** argv) {
  return regcheck::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
