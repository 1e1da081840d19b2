// Runs every acceptance criterion and prints one line per criterion.
// Exit status is nonzero if any criterion fails for a reason other than an
// analysed disagreement with a quoted value.

#include <cstdio>
#include <cstdlib>
#include <string>

#include "binpat/verify/acceptance.hpp"

int main(int argc, char** argv) {
  binpat::verify::AcceptanceOptions opt;
  for (int i = 1; i < argc; ++i) opt.only.push_back(std::atoi(argv[i]));
  const auto results = binpat::verify::run_acceptance(opt, [](const binpat::verify::CriterionResult& r) {
    std::printf("%s\n", binpat::verify::format_result(r).c_str());
    std::fflush(stdout);
  });
  int pass = 0, known = 0;
  for (const auto& r : results) {
    pass += r.pass;
    known += r.known_failure;
  }
  std::printf("%d/%zu passed, %d known failures\n", pass, results.size(), known);
  return binpat::verify::acceptable(results) ? 0 : 1;
}
