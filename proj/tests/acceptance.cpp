// Runs every acceptance criterion and prints one line per criterion.
// Exit status is nonzero when any criterion fails.

#include <cstdio>
#include <exception>

#include "fermi/verification.hpp"

int main() {
  try {
    const auto rep = fermi::verification::run_suite("all");
    int failed = 0;
    for (const auto& c : rep.criteria) {
      std::printf("%s\n", fermi::verification::format_line(c).c_str());
      if (!c.passed) ++failed;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(rep.criteria.size()) - failed,
                rep.criteria.size());
    return failed == 0 ? 0 : 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance: %s\n", e.what());
    return 2;
  }
}
