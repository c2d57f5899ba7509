// Compares the serial reference paths (jobs = 1) against the OpenMP paths for
// the two enumeration-heavy kernels: Gibbs chain sampling and exhaustive
// equivalence checking. Verifies equal results, then reports timings.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "nsrbm/compile.hpp"
#include "nsrbm/rbm.hpp"
#include "nsrbm/verify.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace nsrbm;
using Clock = std::chrono::steady_clock;

namespace {

template <typename F>
double time_of(F&& f) {
    auto t0 = Clock::now();
    f();
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    int jobs = 4;
#ifdef _OPENMP
    jobs = omp_get_max_threads();
#endif
    if (argc > 1) jobs = std::atoi(argv[1]);
    std::printf("parallel jobs: %d\n\n", jobs);

    // a mid-sized random KB drives both kernels
    rbm::Rng rng = rbm::split_rng(7, 0);
    verify::FuzzConfig fuzz;
    fuzz.max_symbols = 16;
    fuzz.max_rules = 12;
    logic::KnowledgeBase kb = verify::random_kb(rng, fuzz);
    compile::CompileConfig ccfg;
    rbm::Rbm m = compile::compile_kb(kb, ccfg);
    std::printf("model: %d visible, %zu hidden units\n\n", m.n_visible, m.hidden.size());

    {
        verify::EquivalenceReport serial, parallel;
        double ts = time_of([&] { serial = verify::check_equivalence(kb, m, ccfg.epsilon, 1e-9, 1); });
        double tp = time_of(
            [&] { parallel = verify::check_equivalence(kb, m, ccfg.epsilon, 1e-9, jobs); });
        bool equal = serial.witness.pass == parallel.witness.pass &&
                     std::abs(serial.witness.max_residual - parallel.witness.max_residual) == 0.0;
        std::printf("equivalence check over %zu assignments\n", serial.n_assignments);
        std::printf("  serial   %8.3f s\n", ts);
        std::printf("  parallel %8.3f s   speedup %.2fx   results %s\n\n", tp, ts / tp,
                    equal ? "identical" : "DIFFER");
        if (!equal) return 1;
    }

    {
        rbm::Clamp clamp = rbm::Clamp::none(m.n_visible);
        clamp.set(0, true);
        clamp.set(1, false);
        const int chains = 200000, steps = 2;
        std::vector<double> serial, parallel;
        double ts = time_of([&] { serial = rbm::gibbs_infer(m, clamp, steps, chains, 99, 1); });
        double tp = time_of([&] { parallel = rbm::gibbs_infer(m, clamp, steps, chains, 99, jobs); });
        bool equal = serial == parallel;
        std::printf("gibbs sampling, %d chains x %d steps\n", chains, steps);
        std::printf("  serial   %8.3f s\n", ts);
        std::printf("  parallel %8.3f s   speedup %.2fx   results %s\n", tp, ts / tp,
                    equal ? "identical" : "DIFFER");
        if (!equal) return 1;
    }
    return 0;
}
