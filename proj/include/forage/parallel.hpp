#pragma once

namespace forage {

/// How independent work items (replicates, fitness evaluations) execute.
struct ExecPolicy {
    bool serial = false;  // force the plain loop even when OpenMP is available
    int threads = 0;      // 0 = runtime default
};

/// Runs fn(i) for every i in [0, n). Iterations must be independent, write
/// only to i-keyed slots, and must not throw (catch inside fn and record the
/// failure in the slot instead). The serial path is the reference semantics;
/// the OpenMP path must be observationally identical.
template <typename Fn>
void parallel_for(long long n, const ExecPolicy& policy, Fn&& fn) {
#ifdef _OPENMP
    if (!policy.serial && n > 1) {
        if (policy.threads > 0) {
#pragma omp parallel for schedule(dynamic) num_threads(policy.threads)
            for (long long i = 0; i < n; ++i) fn(i);
        } else {
#pragma omp parallel for schedule(dynamic)
            for (long long i = 0; i < n; ++i) fn(i);
        }
        return;
    }
#endif
    for (long long i = 0; i < n; ++i) fn(i);
}

}  // namespace forage
