#pragma once
#include <cstdint>

namespace qhgeo {

// splitmix64; used on its own and to derive independent per-trial streams
// from (master seed, trial index) so serial and parallel runs see identical
// randomness regardless of scheduling.
inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(uint64_t seed) : s_(seed) {
        // warm up so nearby seeds decorrelate
        next_u64();
        next_u64();
    }

    static Rng for_trial(uint64_t master_seed, uint64_t trial) {
        uint64_t s = master_seed;
        uint64_t a = splitmix64(s);
        s = a ^ (trial * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
        return Rng(splitmix64(s));
    }

    uint64_t next_u64() { return splitmix64(s_); }

    // uniform in [0, 1), 53 random bits
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [lo, hi] inclusive
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(next_u64() % static_cast<uint64_t>(hi - lo + 1));
    }

private:
    uint64_t s_;
};

} // namespace qhgeo
