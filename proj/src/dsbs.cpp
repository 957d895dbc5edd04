#include "gwci/dsbs.hpp"

#include "gwci/error.hpp"
#include "gwci/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace gwci::dsbs {

namespace {

double h(double p) { return binary_entropy(std::clamp(p, 0.0, 1.0)); }

void check_deltas(double d1, double d2)
{
    if (!(d1 >= 0.0 && d2 >= 0.0))
        throw DomainError("distortions must be nonnegative");
}

std::array<std::array<double, 2>, 2> eps2_joint(double d1, double d2, double a0)
{
    std::array<std::array<double, 2>, 2> pz{};
    pz[1][0] = 0.5 * (a0 + d1 - d2);
    pz[0][1] = 0.5 * (a0 - d1 + d2);
    pz[1][1] = 0.5 * (d1 + d2 - a0);
    pz[0][0] = 1.0 - 0.5 * (d1 + d2 + a0);
    return pz;
}

} // namespace

double derive_a1(double a0)
{
    if (!(a0 >= 0.0 && a0 <= 0.5))
        throw DomainError("DSBS crossover a0 must lie in [0, 1/2]");
    return 0.5 - 0.5 * std::sqrt(1.0 - 2.0 * a0);
}

DsbsModel::DsbsModel(double a0_) : a0(a0_), a1(derive_a1(a0_)) {}

double joint_entropy(const DsbsModel& m) { return 1.0 + h(m.a0); }

double wyner_ci_dsbs(const DsbsModel& m) { return 1.0 + h(m.a0) - 2.0 * h(m.a1); }

bool satisfies_gray_wyner(const RateTriple& r, const DsbsModel& m, double tol)
{
    return r.R0 >= -tol && r.R1 >= -tol && r.R2 >= -tol && r.total() >= joint_entropy(m) - tol &&
           r.R0 + r.R1 >= 1.0 - tol && r.R0 + r.R2 >= 1.0 - tol;
}

const char* region_name(Region r)
{
    switch (r) {
    case Region::E10: return "E10";
    case Region::E11: return "E11";
    case Region::E2: return "E2";
    case Region::E3: return "E3";
    case Region::BeyondHalf: return "BEYOND_HALF";
    }
    return "?";
}

Region classify_dsbs(double d1, double d2, const DsbsModel& m)
{
    check_deltas(d1, d2);
    if (d1 >= 0.5 && d2 >= 0.5)
        return Region::BeyondHalf;
    if (d1 <= m.a1 && d2 <= m.a1)
        return Region::E10;
    if (d1 >= 0.5 || d2 >= 0.5)
        return Region::E3;
    if (binary_convolve(d1, d2) <= m.a0)
        return Region::E11;
    double ratio = std::max((d2 - d1) / (1.0 - 2.0 * d1), (d1 - d2) / (1.0 - 2.0 * d2));
    return ratio > m.a0 ? Region::E3 : Region::E2;
}

double r_xy_dsbs(double d1, double d2, const DsbsModel& m)
{
    switch (classify_dsbs(d1, d2, m)) {
    case Region::E10:
    case Region::E11:
        return 1.0 + h(m.a0) - h(d1) - h(d2);
    case Region::E2: {
        double r = 1.0 - (1.0 - m.a0) * h((d1 + d2 - m.a0) / (2.0 * (1.0 - m.a0)));
        if (m.a0 > 0.0)
            r -= m.a0 * h((m.a0 + d1 - d2) / (2.0 * m.a0));
        return r;
    }
    case Region::E3:
        return 1.0 - h(std::min({d1, d2, 0.5}));
    case Region::BeyondHalf:
        return 0.0;
    }
    return 0.0;
}

std::optional<double> lossy_ci_dsbs(double d1, double d2, const DsbsModel& m)
{
    switch (classify_dsbs(d1, d2, m)) {
    case Region::E10: return wyner_ci_dsbs(m);
    case Region::E11: return std::nullopt;
    case Region::E2:
    case Region::E3: return r_xy_dsbs(d1, d2, m);
    case Region::BeyondHalf: return 0.0;
    }
    return std::nullopt;
}

polar::SideInfoChannel build_point_g_channel(const DsbsModel& m)
{
    double a = m.a1;
    std::vector<std::vector<double>> t(2, std::vector<double>(4));
    for (unsigned w = 0; w < 2; ++w)
        for (unsigned x = 0; x < 2; ++x)
            for (unsigned y = 0; y < 2; ++y)
                t[w][2 * x + y] = (x == w ? 1.0 - a : a) * (y == w ? 1.0 - a : a);
    char label[64];
    std::snprintf(label, sizeof label, "dsbs-g(a0=%.6g)", m.a0);
    return polar::SideInfoChannel::from_backward({0.5, 0.5}, t, label);
}

GbChannel build_gb_channel(const DsbsModel& m, double beta)
{
    if (!(beta >= m.a1 - 1e-15 && beta <= 0.5))
        throw DomainError("GB curve parameter beta must lie in [a1, 1/2]");
    double rho = m.a1 < 0.5 ? std::clamp((beta - m.a1) / (1.0 - 2.0 * m.a1), 0.0, 0.5) : 0.0;
    double a = m.a1;
    std::vector<std::vector<double>> t(2, std::vector<double>(4, 0.0));
    for (unsigned wp = 0; wp < 2; ++wp)
        for (unsigned w = 0; w < 2; ++w) {
            double pw = w == wp ? 1.0 - rho : rho;
            for (unsigned x = 0; x < 2; ++x)
                for (unsigned y = 0; y < 2; ++y)
                    t[wp][2 * x + y] += pw * (x == w ? 1.0 - a : a) * (y == w ? 1.0 - a : a);
        }
    char label[80];
    std::snprintf(label, sizeof label, "dsbs-gb(a0=%.6g,beta=%.6g)", m.a0, beta);
    GbChannel g{polar::SideInfoChannel::from_backward({0.5, 0.5}, t, label), beta, rho, {}};
    double q = m.a0 < 1.0 ? (beta - 0.5 * m.a0) / (1.0 - m.a0) : 0.5;
    g.theory.R0 = (1.0 - m.a0) * (1.0 - h(q));
    g.theory.R1 = g.theory.R2 = h(beta);
    return g;
}

polar::SideInfoChannel DsbsEps2Channel::channel() const
{
    std::vector<std::vector<double>> t(2, std::vector<double>(4));
    for (unsigned w = 0; w < 2; ++w)
        for (unsigned x = 0; x < 2; ++x)
            for (unsigned y = 0; y < 2; ++y)
                t[w][2 * x + y] = prob(x, y, w);
    char label[80];
    std::snprintf(label, sizeof label, "dsbs-e2(d1=%.6g,d2=%.6g)", d1, d2);
    return polar::SideInfoChannel::from_backward({0.5, 0.5}, t, label);
}

DsbsEps2Channel build_eps2_channel(double d1, double d2, const DsbsModel& m)
{
    Region r = classify_dsbs(d1, d2, m);
    if (r != Region::E2)
        throw RegionMismatch(std::string("distortion pair lies in ") + region_name(r) + ", not E2");
    DsbsEps2Channel c;
    c.d1 = d1;
    c.d2 = d2;
    c.pz = eps2_joint(d1, d2, m.a0);
    for (auto& row : c.pz)
        for (double& v : row) {
            if (v < -1e-12)
                throw InvariantError("E2 backward table has a negative entry");
            v = std::max(v, 0.0);
        }
    return c;
}

double ag_partner(double a1, double d1)
{
    if (!(d1 >= 0.0 && d1 <= a1 + 1e-15))
        throw DomainError("line AG needs 0 <= d1 <= a1");
    return std::max(0.0, (a1 - d1) / (1.0 - 2.0 * d1));
}

std::string DsbsPoint::label() const
{
    char buf[96];
    switch (kind) {
    case Kind::A: return "A";
    case Kind::G: return "G";
    case Kind::AG: std::snprintf(buf, sizeof buf, "AG(d1=%.6g)", d1); return buf;
    case Kind::GB: std::snprintf(buf, sizeof buf, "GB(beta=%.6g)", beta); return buf;
    case Kind::LossyE10: std::snprintf(buf, sizeof buf, "E10(%.6g,%.6g)", delta1, delta2); return buf;
    case Kind::LossyE2: std::snprintf(buf, sizeof buf, "E2(%.6g,%.6g)", delta1, delta2); return buf;
    case Kind::LossyE3: std::snprintf(buf, sizeof buf, "E3(%.6g,%.6g)", delta1, delta2); return buf;
    }
    return "?";
}

TheoryTargets dsbs_theory(const DsbsPoint& p, const DsbsModel& m)
{
    TheoryTargets t;
    double C = wyner_ci_dsbs(m), ha1 = h(m.a1);
    using K = DsbsPoint::Kind;
    switch (p.kind) {
    case K::A:
        t.R0 = joint_entropy(m);
        t.CI = C;
        break;
    case K::G:
        t.R0 = C;
        t.R1 = t.R2 = ha1;
        t.CI = C;
        break;
    case K::AG: {
        ag_partner(m.a1, p.d1);
        t.R0 = C + 2.0 * (ha1 - h(p.d1));
        t.R1 = t.R2 = h(p.d1);
        t.CI = C;
        break;
    }
    case K::GB: {
        auto g = build_gb_channel(m, p.beta);
        t.R0 = g.theory.R0;
        t.R1 = g.theory.R1;
        t.R2 = g.theory.R2;
        t.CI = C;
        break;
    }
    case K::LossyE10:
        t.R0 = C;
        t.R1 = ha1 - h(p.delta1);
        t.R2 = ha1 - h(p.delta2);
        t.CI = C;
        t.dist_x = p.delta1;
        t.dist_y = p.delta2;
        break;
    case K::LossyE2:
    case K::LossyE3:
        t.R0 = r_xy_dsbs(p.delta1, p.delta2, m);
        t.CI = t.R0;
        t.dist_x = p.delta1;
        t.dist_y = p.delta2;
        break;
    }
    t.R_total = t.R0 + t.R1 + t.R2;
    return t;
}

} // namespace gwci::dsbs
