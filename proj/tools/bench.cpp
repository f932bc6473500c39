// serial vs openmp timing for the parallel kernels, with an equality check:
// both modes must produce identical bytes, so the speedup is free.

#include <chrono>
#include <cstdio>
#include <string>

#include "qhgeo/geodesic.hpp"
#include "qhgeo/json_io.hpp"
#include "qhgeo/rng.hpp"
#include "qhgeo/theorems.hpp"

using namespace qhgeo;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class F>
void row(const char* name, F run) {
    auto t0 = Clock::now();
    std::string a = run(Exec::serial);
    double ts = seconds_since(t0);
    t0 = Clock::now();
    std::string b = run(Exec::openmp);
    double tp = seconds_since(t0);
    std::printf("%-28s serial %8.3fs  openmp %8.3fs  speedup %5.2fx  %s\n", name, ts, tp,
                ts / (tp > 0.0 ? tp : 1e-9), a == b ? "identical" : "DIFFER");
}

}  // namespace

int main(int argc, char** argv) {
    uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 20260814ull;
    Rng rng(seed);
    VoronoiDomain dom = random_domain(rng, 12, 12);
    Vec2 center = random_point(dom, rng, 0.2);

    row("trace_ball n=512 r=1.5", [&](Exec e) {
        QhBall b = trace_ball(dom, center, 1.5, 512, e);
        return ball_to_csv(b);
    });
    row("prop_curv 2e5 trials", [&](Exec e) {
        return report_to_json(check_prop_curv(200000, 2, seed, e)).dump();
    });
    row("prop_distcurv 5e4 trials", [&](Exec e) {
        return report_to_json(check_prop_distcurv(50000, seed, e)).dump();
    });
    row("smallballs 100 trials", [&](Exec e) {
        return report_to_json(check_smallballs(100, seed, e)).dump();
    });
    row("divergence 150 trials", [&](Exec e) {
        return report_to_json(check_divergence_bound(150, seed, e)).dump();
    });
    row("verify_all scale 0.02", [&](Exec e) {
        return reports_to_csv(verify_all(seed, 0.02, e));
    });
    return 0;
}
