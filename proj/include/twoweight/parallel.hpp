#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace twoweight {

/// Upper bound on worker threads used by the scans. 0 means hardware concurrency.
void set_thread_count(unsigned count);
unsigned thread_count();

/// Runs body(chunk_begin, chunk_end, chunk_id) over [0, count) split into
/// fixed-size chunks. The chunk layout depends only on `count` and
/// `chunk_size`, never on the thread count, so callers that store one partial
/// result per chunk and fold them in chunk order get bit-identical output for
/// any number of threads.
void for_each_chunk(std::size_t count, std::size_t chunk_size,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

inline std::size_t chunk_count(std::size_t count, std::size_t chunk_size) {
  return chunk_size == 0 ? 0 : (count + chunk_size - 1) / chunk_size;
}

/// Deterministic parallel sum: body(i) is evaluated for every i, partial sums
/// are formed per chunk in index order and then folded in chunk order.
template <typename Body>
double parallel_sum(std::size_t count, Body&& body, std::size_t chunk_size = 256) {
  std::vector<double> partial(chunk_count(count, chunk_size), 0.0);
  for_each_chunk(count, chunk_size, [&](std::size_t b, std::size_t e, std::size_t c) {
    double acc = 0.0;
    for (std::size_t i = b; i < e; ++i) acc += body(i);
    partial[c] = acc;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

struct ArgMax {
  double value = -std::numeric_limits<double>::infinity();
  std::size_t index = static_cast<std::size_t>(-1);
  std::size_t evaluated = 0;  // entries where body returned a non-NaN value
  bool found() const { return index != static_cast<std::size_t>(-1); }
};

/// Largest body(i) over [0, count); NaN results are skipped. Ties resolve to
/// the lowest index, so the result does not depend on the thread count.
template <typename Body>
ArgMax parallel_argmax(std::size_t count, Body&& body, std::size_t chunk_size = 16) {
  std::vector<ArgMax> partial(chunk_count(count, chunk_size));
  for_each_chunk(count, chunk_size, [&](std::size_t b, std::size_t e, std::size_t c) {
    ArgMax best;
    for (std::size_t i = b; i < e; ++i) {
      const double v = body(i);
      if (std::isnan(v)) continue;
      ++best.evaluated;
      if (!best.found() || v > best.value) {
        best.value = v;
        best.index = i;
      }
    }
    partial[c] = best;
  });
  ArgMax total;
  for (const auto& p : partial) {
    total.evaluated += p.evaluated;
    if (p.found() && (!total.found() || p.value > total.value)) {
      total.value = p.value;
      total.index = p.index;
    }
  }
  return total;
}

}  // namespace twoweight
