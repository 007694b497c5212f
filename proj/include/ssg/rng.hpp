#pragma once

#include <cstdint>

namespace ssg {

// splitmix64 step; also the mixer used to derive per-block stream states.
std::uint64_t splitmix64(std::uint64_t& state);

// xoshiro256++ stream.  Each Monte Carlo block owns an independent stream
// derived from (seed, block index), so results never depend on how blocks
// are distributed over workers.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);
    static RngStream for_block(std::uint64_t seed, std::uint64_t block);

    std::uint64_t next_u64();
    // uniform on (0, 1)
    double uniform();
    // standard normal via the polar method
    double gaussian();

private:
    std::uint64_t s_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Worker count for estimator internals: min(SSG_THREADS, hardware), at least 1.
int worker_count();

}  // namespace ssg
