#include <iostream>

#include "sek/acceptance.hpp"

int main() {
  int failed = 0;
  for (const auto& r : sek::acceptance::run_all()) {
    std::cout << sek::acceptance::format_line(r) << "\n";
    if (!r.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
