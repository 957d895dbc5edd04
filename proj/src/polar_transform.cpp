#include "gwci/polar.hpp"

#include "gwci/error.hpp"

#include <cmath>
#include <string>

namespace gwci::polar {

namespace detail {

SoftplusTable::SoftplusTable()
{
    for (int i = 0; i < int(kSoftplusMax) * kSoftplusPerUnit + 2; ++i) {
        double x = static_cast<double>(i) / kSoftplusPerUnit;
        v[i] = std::log1p(std::exp(-x));
        d[i] = -1.0 / (1.0 + std::exp(x));
    }
}

const SoftplusTable softplus_table;

} // namespace detail

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

unsigned block_exponent(std::size_t N)
{
    if (!is_power_of_two(N))
        throw DomainError("block length " + std::to_string(N) + " is not a power of two");
    unsigned n = 0;
    while ((std::size_t{1} << n) < N)
        ++n;
    return n;
}

void polar_transform(std::span<std::uint8_t> x)
{
    std::size_t N = x.size();
    block_exponent(N);
    for (std::size_t h = 1; h < N; h *= 2)
        for (std::size_t i = 0; i < N; i += 2 * h)
            for (std::size_t j = i; j < i + h; ++j)
                x[j] ^= x[j + h];
}

Bits polar_transform(const Bits& x)
{
    Bits u = x;
    polar_transform(std::span<std::uint8_t>(u));
    return u;
}

ScEngine::ScEngine(std::size_t N) : N_(N), cbuf_(2 * N), pbuf_(2 * N), bbuf_(2 * N) { block_exponent(N); }

} // namespace gwci::polar
