// Runs acceptance criteria 1-9 and prints one PASS/FAIL line per criterion.
// Exit status is the number of failing criteria (0 when all pass).

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "twoweight/acceptance.hpp"
#include "twoweight/parallel.hpp"

int main(int argc, char** argv) {
  CLI::App app{"twoweight acceptance suite"};
  twoweight::AcceptanceOptions options;
  unsigned threads = 0;
  std::string json_path;
  app.add_option("--only", options.only, "criterion ids to run")->delimiter(',')->check(CLI::Range(1, twoweight::kCriterionCount));
  app.add_option("--seed", options.seed, "seed for the randomized cube families and pairs");
  app.add_option("--threads", threads, "worker threads (0 = all cores)");
  app.add_option("--json", json_path, "also write the results as a JSON report");
  CLI11_PARSE(app, argc, argv);
  twoweight::set_thread_count(threads);

  int failed = 0;
  twoweight::Json all = twoweight::Json::array();
  std::vector<int> ids = options.only;
  if (ids.empty()) {
    for (int i = 1; i <= twoweight::kCriterionCount; ++i) ids.push_back(i);
  }
  for (int id : ids) {
    const auto r = twoweight::run_criterion(id, options);
    std::cout << twoweight::format_line(r) << std::endl;
    failed += r.pass ? 0 : 1;
    all.push_back(twoweight::to_json(r));
  }
  if (!json_path.empty()) {
    std::ofstream f(json_path);
    f << twoweight::dump_report(twoweight::report_envelope("acceptance", {{"seed", options.seed}, {"only", options.only}},
                                                           {{"criteria", all}, {"failed", failed}}));
  }
  std::cout << (failed ? "FAILED " : "ALL PASSED ") << ids.size() - failed << "/" << ids.size() << std::endl;
  return failed;
}
