#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>

namespace grfkit::detail {

/// Pairwise (cascade) summation in a fixed order: deterministic for a given
/// input order and accurate to O(log n) rounding growth.
double pairwise_sum(std::span<const double> xs);

/// Mean via pairwise summation.
double mean(std::span<const double> xs);

/// Unbiased sample variance (two-pass, pairwise sums).  Requires n >= 2.
double sample_variance(std::span<const double> xs);

/// Run fn(begin, end) over [0, n) split into contiguous chunks.  The chunks
/// must write disjoint state; determinism of the result is then independent
/// of the thread count.  threads <= 1 runs inline.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t, std::size_t)>& fn);

/// FNV-1a 64-bit over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes);

/// Lower-case hex, zero-padded to 16 digits.
std::string hex64(std::uint64_t v);

/// Shortest decimal form with 17 significant digits (std::to_chars, general
/// format): round-trips any double, locale-independent.
std::string format_double(double v);

}  // namespace grfkit::detail
