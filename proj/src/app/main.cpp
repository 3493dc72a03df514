// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "chemagent/app.hpp"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return chemagent::app::run_cli(args, {std::cin, std::cout, std::cerr},
                                 chemagent::app::process_env());
}
