#pragma once

#include <functional>
#include <vector>

namespace apernet {

// Deterministic parallel reduction over the nonzero integer vectors m with
// ||m||_inf <= Mi. The caller supplies the partial sum over one inner row:
// block(prefix, j0, j1) = sum over m = (prefix, j), j in [j0, j1]. Rows are
// visited in lexicographic order; per-slot accumulation order and the final
// pairwise tree depend only on (k, Mi), never on the worker count.
double frequency_ball_sum(
    int k, long Mi,
    const std::function<double(const std::vector<long>& prefix, long j0, long j1)>& block);

}  // namespace apernet
