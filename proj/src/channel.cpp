#include "gwci/channel.hpp"

#include "gwci/error.hpp"
#include "gwci/numerics.hpp"
#include "gwci/polar.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace gwci::polar {

namespace {

void check_row(const double* p, std::size_t n, const char* what)
{
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(p[i] >= 0.0) || !std::isfinite(p[i]))
            throw DomainError(std::string(what) + ": negative or non-finite probability");
        s += p[i];
    }
    if (std::fabs(s - 1.0) > 1e-12)
        throw DomainError(std::string(what) + ": row does not sum to 1");
}

double clamp_llr(double a, double b)
{
    if (a == 0.0 && b == 0.0)
        return 0.0;
    if (b == 0.0)
        return kLlrClamp;
    if (a == 0.0)
        return -kLlrClamp;
    return std::clamp(std::log(a) - std::log(b), -kLlrClamp, kLlrClamp);
}

} // namespace

SideInfoChannel::SideInfoChannel(std::vector<double> joint, std::size_t M, Orientation o, std::string label)
    : M_(M), joint_(std::move(joint)), orientation_(o), label_(std::move(label))
{
    if (M_ == 0 || joint_.size() != 2 * M_)
        throw DomainError("SideInfoChannel: malformed table");
    pb_ = {0.0, 0.0};
    for (std::size_t y = 0; y < M_; ++y) {
        pb_[0] += joint_[y];
        pb_[1] += joint_[M_ + y];
    }
    llr_.resize(M_);
    for (std::size_t y = 0; y < M_; ++y)
        llr_[y] = clamp_llr(joint_[y], joint_[M_ + y]);
    prior_llr_ = clamp_llr(pb_[0], pb_[1]);
    cdf_.resize(2 * M_);
    double acc = 0.0;
    for (std::size_t k = 0; k < 2 * M_; ++k) {
        acc += joint_[k];
        cdf_[k] = acc;
    }
    std::string canon = (o == Orientation::Reconstruction ? "rec:" : "cmp:") + std::to_string(M_);
    char buf[32];
    for (double v : joint_) {
        std::snprintf(buf, sizeof buf, ",%.17g", v);
        canon += buf;
    }
    id_ = "ch-" + hex64(fnv1a64(canon));
}

SideInfoChannel SideInfoChannel::from_backward(std::array<double, 2> prior,
                                               const std::vector<std::vector<double>>& table, std::string label)
{
    check_row(prior.data(), 2, "SideInfoChannel prior");
    if (table.size() != 2 || table[0].size() != table[1].size() || table[0].empty())
        throw DomainError("SideInfoChannel: backward table must have two rows of equal length");
    std::size_t M = table[0].size();
    std::vector<double> joint(2 * M);
    for (unsigned b = 0; b < 2; ++b) {
        check_row(table[b].data(), M, "SideInfoChannel row");
        for (std::size_t y = 0; y < M; ++y)
            joint[b * M + y] = prior[b] * table[b][y];
    }
    return SideInfoChannel(std::move(joint), M, Orientation::Reconstruction, std::move(label));
}

SideInfoChannel SideInfoChannel::from_forward(const std::vector<double>& marginal,
                                              const std::vector<std::array<double, 2>>& table, std::string label)
{
    std::size_t M = marginal.size();
    if (M == 0 || table.size() != M)
        throw DomainError("SideInfoChannel: forward table must have one row per side-information symbol");
    check_row(marginal.data(), M, "SideInfoChannel marginal");
    std::vector<double> joint(2 * M);
    for (std::size_t y = 0; y < M; ++y) {
        check_row(table[y].data(), 2, "SideInfoChannel row");
        joint[y] = marginal[y] * table[y][0];
        joint[M + y] = marginal[y] * table[y][1];
    }
    return SideInfoChannel(std::move(joint), M, Orientation::Compressed, std::move(label));
}

SideInfoChannel SideInfoChannel::bernoulli(double p)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw DomainError("SideInfoChannel::bernoulli: p outside [0,1]");
    char buf[64];
    std::snprintf(buf, sizeof buf, "Ber(%.17g)", p);
    return SideInfoChannel({1.0 - p, p}, 1, Orientation::Compressed, buf);
}

void SideInfoChannel::sample(CounterRng& rng, std::uint8_t& b, std::uint32_t& y) const
{
    double u = rng.uniform() * cdf_.back();
    std::size_t k = static_cast<std::size_t>(std::upper_bound(cdf_.begin(), cdf_.end(), u) - cdf_.begin());
    if (k >= cdf_.size())
        k = cdf_.size() - 1;
    b = static_cast<std::uint8_t>(k / M_);
    y = static_cast<std::uint32_t>(k % M_);
}

double SideInfoChannel::entropy_b() const { return binary_entropy(std::clamp(pb_[1], 0.0, 1.0)); }

double SideInfoChannel::cond_entropy_b() const
{
    double h = 0.0;
    for (std::size_t y = 0; y < M_; ++y) {
        double py = prob_y(y);
        if (py > 0.0)
            h += py * binary_entropy(std::clamp(joint_[M_ + y] / py, 0.0, 1.0));
    }
    return h;
}

std::vector<double> SideInfoChannel::leaf_llrs(const std::vector<std::uint32_t>& y) const
{
    std::vector<double> L(y.size());
    for (std::size_t j = 0; j < y.size(); ++j) {
        if (y[j] >= M_)
            throw DomainError("observation symbol outside the channel alphabet");
        L[j] = llr_[y[j]];
    }
    return L;
}

} // namespace gwci::polar
