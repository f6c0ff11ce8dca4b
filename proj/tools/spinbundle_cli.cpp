#include <iostream>
#include <string>
#include <vector>

#include "spinbundle/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return spinbundle::cli::run_cli(args, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return spinbundle::cli::kUsage;
  }
}
