#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qhgeo {

// Data-parallel kernels (grid construction, ball sampling, verification
// trials) take an execution mode. The serial mode is the reference the
// parallel mode is tested against; results must match byte for byte, which
// the kernels achieve by indexed writes and order-fixed reductions.
enum class Exec { serial, openmp };

inline Exec default_exec() {
#ifdef _OPENMP
    return Exec::openmp;
#else
    return Exec::serial;
#endif
}

inline int exec_threads(Exec e) {
#ifdef _OPENMP
    return e == Exec::openmp ? omp_get_max_threads() : 1;
#else
    (void)e;
    return 1;
#endif
}

} // namespace qhgeo
