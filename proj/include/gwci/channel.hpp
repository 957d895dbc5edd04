#pragma once

#include "gwci/rng.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace gwci::polar {

// Joint law of a binary variable B (the one passed through G_N) and a finite
// observation Y. For lossy coding B is the reconstruction symbol and Y the
// source symbol; for lossless coding B is the source and Y the side information.
class SideInfoChannel {
public:
    enum class Orientation { Reconstruction, Compressed };

    // Rows table[b][y] = P(y | b); prior = {P(B=0), P(B=1)}.
    static SideInfoChannel from_backward(std::array<double, 2> prior, const std::vector<std::vector<double>>& table,
                                         std::string label);
    // Rows table[y][b] = P(b | y); marginal[y] = P(Y=y).
    static SideInfoChannel from_forward(const std::vector<double>& marginal,
                                        const std::vector<std::array<double, 2>>& table, std::string label);
    // B ~ Ber(p) with nothing observed.
    static SideInfoChannel bernoulli(double p);

    std::size_t alphabet() const { return M_; }
    Orientation orientation() const { return orientation_; }
    const std::string& label() const { return label_; }
    const std::string& id() const { return id_; }

    double joint(unsigned b, std::size_t y) const { return joint_[b * M_ + y]; }
    double prob_b(unsigned b) const { return pb_[b]; }
    double prob_y(std::size_t y) const { return joint_[y] + joint_[M_ + y]; }

    double cond_llr(std::size_t y) const { return llr_[y]; }
    double prior_llr() const { return prior_llr_; }
    bool prior_uniform() const { return pb_[0] == pb_[1]; }
    bool observation_free() const { return M_ == 1; }

    // Draws (b, y) from the joint law.
    void sample(CounterRng& rng, std::uint8_t& b, std::uint32_t& y) const;

    double entropy_b() const;
    double cond_entropy_b() const;
    double mutual_information() const { return entropy_b() - cond_entropy_b(); }

    // Per-coordinate conditional LLRs; throws DomainError on out-of-alphabet symbols.
    std::vector<double> leaf_llrs(const std::vector<std::uint32_t>& y) const;

private:
    SideInfoChannel(std::vector<double> joint, std::size_t M, Orientation o, std::string label);

    std::size_t M_;
    std::vector<double> joint_, cdf_, llr_;
    std::array<double, 2> pb_{};
    double prior_llr_ = 0.0;
    Orientation orientation_;
    std::string label_, id_;
};

} // namespace gwci::polar
