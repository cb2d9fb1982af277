#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mechkit {

// Every parallel kernel in the library has a serial twin with identical
// semantics; Execution selects between them. The parallel variants are
// written so that results are bit-identical to the serial ones (fixed
// chunking, ordered combines), which the test suite relies on.
enum class Execution { serial, parallel };

namespace detail {

inline constexpr std::size_t kChunk = 4096;

// Sum of term(0..n-1) in long double. The index range is split into fixed
// chunks; chunk subtotals are combined in chunk order, so the floating-point
// result does not depend on the thread count.
template <class Term>
long double chunked_sum(std::size_t n, Execution exec, Term&& term) {
  if (n == 0) return 0.0L;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  std::vector<long double> partial(chunks, 0.0L);

  auto run_chunk = [&](std::size_t c) {
    const std::size_t lo = c * kChunk;
    const std::size_t hi = lo + kChunk < n ? lo + kChunk : n;
    long double acc = 0.0L;
    for (std::size_t i = lo; i < hi; ++i) acc += term(i);
    partial[c] = acc;
  };

#ifdef _OPENMP
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (long long c = 0; c < static_cast<long long>(chunks); ++c)
      run_chunk(static_cast<std::size_t>(c));
  } else
#endif
  {
    (void)exec;
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
  }

  long double total = 0.0L;
  for (std::size_t c = 0; c < chunks; ++c) total += partial[c];
  return total;
}

// Runs body(i) for i in [0, n), collecting per-index result vectors and
// concatenating them in index order. Used by the pair-scan kernels to keep
// witness lists deterministic under parallel execution.
template <class T, class Body>
std::vector<T> ordered_collect(std::size_t n, Execution exec, Body&& body) {
  std::vector<std::vector<T>> buckets(n);

#ifdef _OPENMP
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
      buckets[static_cast<std::size_t>(i)] = body(static_cast<std::size_t>(i));
  } else
#endif
  {
    (void)exec;
    for (std::size_t i = 0; i < n; ++i) buckets[i] = body(i);
  }

  std::vector<T> out;
  std::size_t total = 0;
  for (const auto& b : buckets) total += b.size();
  out.reserve(total);
  for (auto& b : buckets) out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace detail
}  // namespace mechkit
