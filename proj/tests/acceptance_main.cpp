#include <cstring>
#include <iostream>
#include <string>

#include "gossip/acceptance.hpp"

int main(int argc, char** argv) {
  gossip::AcceptanceOptions options;
  options.full = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--full") == 0) options.full = true;
    else if (std::strcmp(argv[i], "--quick") == 0) options.full = false;
    else options.only.push_back(std::stoi(argv[i]));
  }
  const auto results = gossip::run_acceptance(options, std::cout);
  int failed = 0;
  for (const auto& r : results) failed += r.passed ? 0 : 1;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
