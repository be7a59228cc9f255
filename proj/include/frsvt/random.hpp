#ifndef FRSVT_RANDOM_HPP
#define FRSVT_RANDOM_HPP

#include <cstdint>
#include <random>

#include "frsvt/matrix.hpp"

namespace frsvt {

namespace detail {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t index) noexcept
{
    return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

} // namespace detail

//
// Reproducible random stream addressed by (master seed, stream index).
// Distinct indices give statistically independent sequences, so trial i of a
// benchmark can use stream i regardless of which thread runs it.
//
class RngStream
{
public:
    RngStream(std::uint64_t seed, std::uint64_t index = 0)
        : seed_(seed), index_(index), engine_(detail::stream_key(seed, index))
    {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t index() const noexcept { return index_; }

    // Child stream keyed on this stream's address, not on its current position.
    RngStream fork(std::uint64_t tag) const
    {
        return RngStream(detail::stream_key(seed_, index_), tag);
    }

    double normal() { return normal_(engine_); }

    double uniform(double lo, double hi)
    {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n)
    {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
    }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::uint64_t seed_;
    std::uint64_t index_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

// m x n i.i.d. standard normal entries, filled column by column.
inline Matrix gaussian_matrix(RngStream& rng, Index m, Index n)
{
    require(m >= 1 && n >= 1, "gaussian_matrix: dimensions must be positive");
    Matrix G(m, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < m; ++i)
            G(i, j) = rng.normal();
    return G;
}

} // namespace frsvt

#endif // FRSVT_RANDOM_HPP
