#include "apernet/freqsweep.hpp"

#include "apernet/kernels.hpp"
#include "apernet/parallel.hpp"

#include <stdexcept>

namespace apernet {

double frequency_ball_sum(
    int k, long Mi,
    const std::function<double(const std::vector<long>& prefix, long j0, long j1)>& block) {
  if (k < 1 || Mi < 1) throw std::invalid_argument("frequency_ball_sum: k >= 1, M >= 1");

  if (k == 1) {
    std::vector<long> none;
    double lo = block(none, -Mi, -1);
    double hi = block(none, 1, Mi);
    return lo + hi;
  }

  long slots = 2 * Mi + 1;
  std::vector<double> slot_sums(static_cast<std::size_t>(slots), 0.0);

  parallel_for(static_cast<std::size_t>(slots), [&](std::size_t s) {
    long m1 = static_cast<long>(s) - Mi;
    std::vector<long> prefix(static_cast<std::size_t>(k - 1), 0);
    prefix[0] = m1;
    double acc = 0.0;
    // lexicographic recursion over m_2..m_{k-1}; fixed order, sequential adds
    std::function<void(int)> rec = [&](int pos) {
      if (pos == k - 1) {
        bool zero_prefix = true;
        for (long v : prefix)
          if (v != 0) {
            zero_prefix = false;
            break;
          }
        if (zero_prefix) {
          acc += block(prefix, -Mi, -1);
          acc += block(prefix, 1, Mi);
        } else {
          acc += block(prefix, -Mi, Mi);
        }
        return;
      }
      for (long v = -Mi; v <= Mi; ++v) {
        prefix[static_cast<std::size_t>(pos)] = v;
        rec(pos + 1);
      }
    };
    rec(1);
    slot_sums[s] = acc;
  });

  return kernels::sum_pairwise(slot_sums.data(), slot_sums.size());
}

}  // namespace apernet
