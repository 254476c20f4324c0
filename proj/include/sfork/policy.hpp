#pragma once

#include <stdexcept>

namespace sfork {

// Single-fork policy (p, r, l): wait until (1-p)n tasks finish, then give
// each of the pn stragglers r extra replicas; l = 0 kills and relaunches the
// original copy, l = 1 keeps it running.
struct SingleForkPolicy {
  double p = 0.0;  // straggler fraction in [0,1)
  int r = 0;       // replicas added per straggler, >= 0
  int l = 1;       // 0 = relaunch, 1 = keep original
};

inline SingleForkPolicy single_fork(double p, int r, int l) {
  if (!(p >= 0.0 && p < 1.0) || r < 0 || (l != 0 && l != 1)) {
    throw std::invalid_argument(
        "single_fork: requires 0 <= p < 1, r >= 0, l in {0,1}");
  }
  return SingleForkPolicy{p, r, l};
}

// p = 0, or r = 0 with the original kept, changes nothing: plain n-way
// parallelism with no replication.
inline bool is_baseline(const SingleForkPolicy &pi) {
  return pi.p == 0.0 || (pi.r == 0 && pi.l == 1);
}

}  // namespace sfork
