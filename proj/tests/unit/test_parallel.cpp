#include <cmath>
#include <numeric>

#include "doctest.h"
#include "twoweight/parallel.hpp"

using namespace twoweight;

namespace {
struct ThreadGuard {
  unsigned saved = thread_count();
  ~ThreadGuard() { set_thread_count(saved); }
};
}  // namespace

TEST_SUITE("parallel") {
  TEST_CASE("for_each_chunk covers every index once") {
    ThreadGuard g;
    for (unsigned t : {1u, 2u, 5u}) {
      set_thread_count(t);
      std::vector<int> hits(1001, 0);
      for_each_chunk(hits.size(), 64, [&](std::size_t b, std::size_t e, std::size_t) {
        for (std::size_t i = b; i < e; ++i) ++hits[i];
      });
      CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
  }

  TEST_CASE("parallel_sum is bit-identical across thread counts") {
    ThreadGuard g;
    auto body = [](std::size_t i) { return 1.0 / (1.0 + static_cast<double>(i) * 0.37) * std::sin(i * 0.1); };
    set_thread_count(1);
    const double one = parallel_sum(100000, body);
    for (unsigned t : {2u, 3u, 8u}) {
      set_thread_count(t);
      CHECK(parallel_sum(100000, body) == one);
    }
  }

  TEST_CASE("parallel_argmax breaks ties at the lowest index and skips NaN") {
    ThreadGuard g;
    set_thread_count(4);
    const auto r = parallel_argmax(1000, [](std::size_t i) {
      if (i % 7 == 0) return std::nan("");
      return (i == 300 || i == 600) ? 5.0 : 1.0;
    });
    CHECK(r.index == 300);
    CHECK(r.value == 5.0);
    CHECK(r.evaluated == 1000 - 143);
    CHECK_FALSE(parallel_argmax(0, [](std::size_t) { return 1.0; }).found());
  }
}
