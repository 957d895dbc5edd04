#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace gwci::polar {

using Bits = std::vector<std::uint8_t>;

// Leaf LLR magnitudes are clamped here so that deterministic channel entries
// stay finite inside the recursion.
inline constexpr double kLlrClamp = 1000.0;

bool is_power_of_two(std::size_t n);
// log2 of N; throws DomainError unless N is a power of two.
unsigned block_exponent(std::size_t N);

// u = x G_N with G_N = [[1,0],[1,1]]^{(x)n}, no bit reversal. In place.
void polar_transform(std::span<std::uint8_t> x);
Bits polar_transform(const Bits& x);

namespace detail {
inline constexpr int kSoftplusPerUnit = 32;
inline constexpr double kSoftplusMax = 40.0;
struct SoftplusTable {
    SoftplusTable();
    double v[int(kSoftplusMax) * kSoftplusPerUnit + 2];
    double d[int(kSoftplusMax) * kSoftplusPerUnit + 2];
};
extern const SoftplusTable softplus_table;
} // namespace detail

// log(1 + e^{-x}) for x >= 0 by cubic Hermite interpolation (abs error < 1e-9).
inline double softplus_neg(double x)
{
    if (x >= detail::kSoftplusMax)
        return 0.0;
    double y = x * detail::kSoftplusPerUnit;
    int i = static_cast<int>(y);
    double t = y - i, h = 1.0 / detail::kSoftplusPerUnit;
    const auto& T = detail::softplus_table;
    double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * T.v[i] + (t3 - 2 * t2 + t) * h * T.d[i] + (-2 * t3 + 3 * t2) * T.v[i + 1] +
           (t3 - t2) * h * T.d[i + 1];
}

inline double boxplus(double a, double b)
{
    double aa = std::fabs(a), ab = std::fabs(b);
    double m = aa < ab ? aa : ab;
    double r = m + softplus_neg(aa + ab) - softplus_neg(std::fabs(aa - ab));
    return (std::signbit(a) != std::signbit(b)) ? -r : r;
}

// Successive-cancellation recursion over one or two LLR chains that share the
// decided bits. decide(i, Lcond, Lprior) returns u_i.
class ScEngine {
public:
    explicit ScEngine(std::size_t N);

    std::size_t size() const { return N_; }

    // cond and prior may each be null; x receives u G_N.
    template <class Decide>
    void run(const double* cond, const double* prior, Decide&& decide, std::uint8_t* u, std::uint8_t* x)
    {
        u_ = u;
        rec(0, N_, 0, cond, prior, x, decide);
    }

private:
    double* cbuf(std::size_t n) { return cbuf_.data() + 2 * N_ - 2 * n; }
    double* pbuf(std::size_t n) { return pbuf_.data() + 2 * N_ - 2 * n; }
    std::uint8_t* bbuf(std::size_t n) { return bbuf_.data() + 2 * N_ - 2 * n; }

    template <class Decide>
    void rec(unsigned d, std::size_t n, std::size_t base, const double* Lc, const double* Lp, std::uint8_t* out,
             Decide& decide)
    {
        if (n == 1) {
            std::uint8_t b = decide(base, Lc ? Lc[0] : 0.0, Lp ? Lp[0] : 0.0);
            out[0] = b;
            u_[base] = b;
            return;
        }
        std::size_t h = n / 2;
        double* ac = Lc ? cbuf(h) : nullptr;
        double* ap = Lp ? pbuf(h) : nullptr;
        if (ac)
            for (std::size_t j = 0; j < h; ++j)
                ac[j] = boxplus(Lc[j], Lc[j + h]);
        if (ap)
            for (std::size_t j = 0; j < h; ++j)
                ap[j] = boxplus(Lp[j], Lp[j + h]);
        std::uint8_t* child = bbuf(h);
        rec(d + 1, h, base, ac, ap, child, decide);
        for (std::size_t j = 0; j < h; ++j)
            out[j] = child[j];
        if (ac)
            for (std::size_t j = 0; j < h; ++j)
                ac[j] = Lc[j + h] + (out[j] ? -Lc[j] : Lc[j]);
        if (ap)
            for (std::size_t j = 0; j < h; ++j)
                ap[j] = Lp[j + h] + (out[j] ? -Lp[j] : Lp[j]);
        rec(d + 1, h, base + h, ac, ap, child, decide);
        for (std::size_t j = 0; j < h; ++j) {
            out[j] ^= child[j];
            out[j + h] = child[j];
        }
    }

    std::size_t N_;
    std::vector<double> cbuf_, pbuf_;
    std::vector<std::uint8_t> bbuf_;
    std::uint8_t* u_ = nullptr;
};

} // namespace gwci::polar
