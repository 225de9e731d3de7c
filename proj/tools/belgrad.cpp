#include <iostream>

#include "belgrad/harness/config.hpp"

int main(int argc, char** argv) {
  const auto parsed = belgrad::harness::parse_config(argc, argv);
  if (!parsed.config) {
    (parsed.exit_code == 0 ? std::cout : std::cerr) << parsed.message;
    if (!parsed.message.empty() && parsed.message.back() != '\n') std::cerr << "\n";
    return parsed.exit_code;
  }
  return belgrad::harness::run(*parsed.config);
}
