#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace covquant::detsum {

// Grid sweeps accumulate in a fixed structure: the index range is cut into
// leaves of kLeafWidth consecutive indices, each leaf is summed left to
// right, and the leaf partials are folded by a fixed binary tree. The
// arithmetic order is therefore independent of the thread count, so the
// OpenMP path reproduces the serial reference bit for bit.
inline constexpr std::size_t kLeafWidth = 64;

/// Process-wide default for the parallel/serial switch. The CLI and the
/// benchmark flip it; library entry points take it as their default.
inline bool& parallel_default() {
    static bool value = true;
    return value;
}

/// accum(acc, i) adds term i into acc. T needs copy and operator+=.
template <class T, class AccumFn>
T accumulate(std::size_t n, const T& zero, AccumFn&& accum, bool parallel) {
    if (n == 0) return zero;
    const std::size_t blocks = (n + kLeafWidth - 1) / kLeafWidth;
    std::vector<T> partial(blocks, zero);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (long long b = 0; b < static_cast<long long>(blocks); ++b) {
        T acc = zero;
        const std::size_t lo = static_cast<std::size_t>(b) * kLeafWidth;
        const std::size_t hi = lo + kLeafWidth < n ? lo + kLeafWidth : n;
        for (std::size_t i = lo; i < hi; ++i) accum(acc, i);
        partial[static_cast<std::size_t>(b)] = acc;
    }
    for (std::size_t width = 1; width < blocks; width *= 2)
        for (std::size_t k = 0; k + width < blocks; k += 2 * width)
            partial[k] += partial[k + width];
    return partial[0];
}

template <class T, class AccumFn>
T accumulate(std::size_t n, const T& zero, AccumFn&& accum) {
    return accumulate(n, zero, accum, parallel_default());
}

/// Independent per-index work (disjoint writes only).
template <class Fn>
void for_each(std::size_t n, Fn&& fn, bool parallel = parallel_default()) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        fn(static_cast<std::size_t>(i));
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace covquant::detsum
