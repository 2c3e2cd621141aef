#include "seqcv/rng.hpp"

namespace seqcv {

Rng make_rng(std::uint64_t seed, std::uint64_t replicate, StreamTag tag) {
    return Rng(stream_seed(seed, replicate, tag));
}

}  // namespace seqcv
