#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "relosc/verify.hpp"

// Usage: relosc_acceptance [id ...]   (no ids: all criteria)
int main(int argc, char** argv) {
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) {
    try {
      ids.push_back(std::stoi(argv[i]));
    } catch (const std::exception&) {
      std::cerr << "not a criterion id: " << argv[i] << "\n";
      return 2;
    }
  }
  if (ids.empty()) ids = relosc::criteria_for(relosc::VerifyLevel::full);
  int failed = 0;
  for (int id : ids) {
    relosc::CriterionResult r;
    try {
      r = relosc::run_criterion(id);
    } catch (const std::invalid_argument& e) {
      std::cerr << e.what() << "\n";
      return 2;
    }
    std::cout << (r.passed ? "PASS" : "FAIL") << " [" << r.id << "] " << r.name << ": " << r.measured << " ("
              << r.detail << ") " << relosc::format_seconds(r.seconds) << " s" << std::endl;
    if (!r.passed) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
