#include <iostream>

#include "tcsim/cli/app.hpp"

int main(int argc, char** argv) {
  return tcsim::cli::run_app(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
