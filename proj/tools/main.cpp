#include <string>
#include <vector>

#include "sharp_subgrad/cli.hpp"

int main(int argc, char** argv) {
  return sharp_subgrad::cli::main_entry(std::vector<std::string>(argv + 1, argv + argc));
}
