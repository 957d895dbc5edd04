#include "gwci/blocks.hpp"
#include "gwci/error.hpp"
#include "gwci/gaussian.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

namespace gwci::gaussian {

using lattice::MultilevelLatticeCode;

namespace {

struct Builder {
    const PipelineContext& ctx;
    const LatticeSettings& ls;
    std::size_t N;
    ExperimentRecord& rec;
    polar::ProfileStore local;

    MultilevelLatticeCode code(const lattice::MmseParams& mmse, const std::string& tag)
    {
        lattice::ChainChoice choice;
        choice.levels = ls.levels;
        choice.target_flatness = ls.target_flatness;
        auto chain = lattice::choose_chain(mmse, choice);
        lattice::BuildOptions opt;
        opt.target_flatness = ls.target_flatness;
        opt.rate_margin = ctx.margins.lossy;
        opt.threads = ctx.threads;
        opt.store = ctx.store ? ctx.store : &local;
        auto c = lattice::build_multilevel_code(chain, mmse, N, ctx.polar_beta, ctx.samples, ctx.construction_seed,
                                                opt);
        rec.cache_ids.insert(rec.cache_ids.end(), c.cache_ids.begin(), c.cache_ids.end());
        rec.extra[tag + ".s"] = chain.s;
        rec.extra[tag + ".levels"] = chain.r;
        rec.extra[tag + ".flatness"] = c.flatness;
        rec.extra[tag + ".rate"] = c.total_rate;
        double mi = 0.0;
        for (std::size_t l = 0; l < c.level_mi.size(); ++l) {
            rec.extra[tag + ".level" + std::to_string(l + 1) + ".rate"] = c.level_rates[l];
            mi += c.level_mi[l];
        }
        rec.extra[tag + ".chain_mi"] = mi;
        rec.extra[tag + ".direct_mi"] = c.direct_mi;
        return c;
    }
};

// Quantizes t and checks that the decoder side reproduces the encoder's points.
std::vector<double> quantize(const std::vector<double>& t, const MultilevelLatticeCode& code, polar::SharedSeed sh,
                             polar::ScEngine& eng, double& rate)
{
    auto q = lattice::lattice_quantize(t, code, sh, eng);
    if (lattice::lattice_reconstruct(q.payloads, code, sh, eng) != q.reconstruction)
        throw InvariantError("lattice reconstruction differs from the encoder output");
    rate += q.rate;
    return std::move(q.reconstruction);
}

double mse(const std::vector<double>& src, int dim, int coord, const std::vector<double>& rec)
{
    double s = 0.0;
    for (std::size_t j = 0; j < rec.size(); ++j) {
        double d = src[j * dim + coord] - rec[j];
        s += d * d;
    }
    return rec.empty() ? 0.0 : s / static_cast<double>(rec.size());
}

void finish(ExperimentRecord& rec, std::chrono::steady_clock::time_point t0)
{
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    std::sort(rec.cache_ids.begin(), rec.cache_ids.end());
    rec.cache_ids.erase(std::unique(rec.cache_ids.begin(), rec.cache_ids.end()), rec.cache_ids.end());
}

} // namespace

ExperimentRecord extract_common(const GaussianTask& task, std::size_t N, const PipelineContext& ctx,
                                const LatticeSettings& ls)
{
    polar::block_exponent(N);
    auto t0 = std::chrono::steady_clock::now();
    using K = GaussianTask::Kind;
    ExperimentRecord rec;
    rec.N = N;
    rec.theory = gaussian_theory(task);
    Builder b{ctx, ls, N, rec, {}};

    int dim = 2;
    std::vector<double> chol;
    std::vector<double> weights;
    lattice::MmseParams mmse;
    double slope = 1.0;
    int keep = 0; // coordinate whose reconstruction is the lattice output
    switch (task.kind) {
    case K::Common:
    case K::Eps10: {
        GaussianPairModel m(task.rho);
        auto red = reduce_pair(m);
        chol = cholesky(LGaussianModel(2, task.rho).covariance(), 2);
        weights = red.weights;
        mmse = red.mmse;
        break;
    }
    case K::CommonL: {
        LGaussianModel m(task.L, task.rho);
        auto red = reduce_L(m);
        dim = task.L;
        chol = cholesky(m.covariance(), dim);
        weights = red.weights;
        mmse = red.mmse;
        break;
    }
    case K::Eps2: {
        GaussianPairModel m(task.rho);
        auto red = reduce_eps2(task.delta1, task.delta2, m);
        chol = cholesky(LGaussianModel(2, task.rho).covariance(), 2);
        weights = red.weights;
        mmse = red.mmse;
        slope = red.slope;
        break;
    }
    case K::Eps3: {
        GaussianPairModel m(task.rho);
        Region r = classify_gaussian(task.delta1, task.delta2, m);
        if (r != Region::E3)
            throw RegionMismatch(std::string("distortion pair lies in ") + region_name(r) + ", not eps3");
        keep = task.delta1 <= task.delta2 ? 0 : 1;
        double d = std::min(task.delta1, task.delta2);
        chol = cholesky(LGaussianModel(2, task.rho).covariance(), 2);
        weights = keep == 0 ? std::vector<double>{1.0, 0.0} : std::vector<double>{0.0, 1.0};
        mmse = lattice::mmse_params(1.0, 1.0 - d);
        slope = task.rho;
        break;
    }
    }
    rec.extra["sigma_s2"] = mmse.sigma_s2;
    rec.extra["sigma_r2"] = mmse.sigma_r2;
    auto code = std::make_shared<MultilevelLatticeCode>(b.code(mmse, "common"));

    std::function<void(std::uint64_t, std::uint64_t, polar::ScEngine&, BlockResult&)> body =
        [=](std::uint64_t seed, std::uint64_t block, polar::ScEngine& eng, BlockResult& r) {
            std::vector<double> src;
            gaussian_source(chol, dim, seed, block, N, src);
            std::vector<double> t(N, 0.0);
            for (std::size_t j = 0; j < N; ++j)
                for (int i = 0; i < dim; ++i)
                    t[j] += weights[i] * src[j * dim + i];
            auto w = quantize(t, *code, stage_seed(seed, block, 0), eng, r.R0);
            std::vector<double> other(w);
            for (double& v : other)
                v *= slope;
            const auto& rx = keep == 0 ? w : other;
            const auto& ry = keep == 0 ? other : w;
            r.dist_x = mse(src, dim, 0, rx);
            r.dist_y = mse(src, dim, 1, ry);
        };
    rec.blocks = run_blocks(ctx, N, body);
    finish(rec, t0);
    return rec;
}

ExperimentRecord refine_private_eps10(const GaussianTask& task, std::size_t N, const PipelineContext& ctx,
                                      const LatticeSettings& ls)
{
    polar::block_exponent(N);
    auto t0 = std::chrono::steady_clock::now();
    GaussianPairModel m(task.rho);
    if (!(task.delta1 <= 1.0 - task.rho && task.delta2 <= 1.0 - task.rho && task.delta1 > 0.0 && task.delta2 > 0.0))
        throw RegionMismatch("private refinement needs 0 < delta_i <= 1 - rho");
    ExperimentRecord rec;
    rec.N = N;
    GaussianTask t = task;
    t.kind = GaussianTask::Kind::Eps10;
    rec.theory = gaussian_theory(t);
    Builder b{ctx, ls, N, rec, {}};
    auto red = reduce_pair(m);
    auto chol = cholesky(LGaussianModel(2, task.rho).covariance(), 2);
    auto common = std::make_shared<MultilevelLatticeCode>(b.code(red.mmse, "common"));
    std::shared_ptr<MultilevelLatticeCode> priv[2];
    double deltas[2] = {task.delta1, task.delta2};
    for (int i = 0; i < 2; ++i)
        if (deltas[i] < 1.0 - task.rho - 1e-12)
            priv[i] = std::make_shared<MultilevelLatticeCode>(
                b.code(lattice::mmse_params(1.0 - task.rho, 1.0 - task.rho - deltas[i]), i == 0 ? "private_x" : "private_y"));

    std::vector<double> resid_var(ctx.seeds.size() * ctx.blocks, 0.0);
    std::function<void(std::uint64_t, std::uint64_t, polar::ScEngine&, BlockResult&)> body =
        [&, common, priv](std::uint64_t seed, std::uint64_t block, polar::ScEngine& eng, BlockResult& r) {
            std::vector<double> src;
            gaussian_source(chol, 2, seed, block, N, src);
            std::vector<double> t(N);
            for (std::size_t j = 0; j < N; ++j)
                t[j] = 0.5 * (src[2 * j] + src[2 * j + 1]);
            auto w = quantize(t, *common, stage_seed(seed, block, 0), eng, r.R0);
            double* rates[2] = {&r.R1, &r.R2};
            double* dists[2] = {&r.dist_x, &r.dist_y};
            double rv = 0.0;
            for (int i = 0; i < 2; ++i) {
                std::vector<double> res(N), rec_i(w);
                for (std::size_t j = 0; j < N; ++j)
                    res[j] = src[2 * j + i] - w[j];
                if (i == 0) {
                    double mu = 0.0;
                    for (double v : res)
                        mu += v;
                    mu /= static_cast<double>(N);
                    for (double v : res)
                        rv += (v - mu) * (v - mu);
                    rv /= static_cast<double>(N - 1);
                }
                if (priv[i]) {
                    auto q = quantize(res, *priv[i], stage_seed(seed, block, 1 + i), eng, *rates[i]);
                    for (std::size_t j = 0; j < N; ++j)
                        rec_i[j] += q[j];
                }
                *dists[i] = mse(src, 2, i, rec_i);
            }
            std::size_t idx = 0;
            for (std::size_t s = 0; s < ctx.seeds.size(); ++s)
                if (ctx.seeds[s] == seed)
                    idx = s * ctx.blocks + block;
            resid_var[idx] = rv;
        };
    rec.blocks = run_blocks(ctx, N, body);
    double mv = 0.0;
    for (double v : resid_var)
        mv += v;
    rec.extra["residual_var_x"] = resid_var.empty() ? 0.0 : mv / static_cast<double>(resid_var.size());
    finish(rec, t0);
    return rec;
}

ExperimentRecord run_gaussian_pipeline(const GaussianTask& task, std::size_t N, const PipelineContext& ctx,
                                       const LatticeSettings& ls)
{
    if (task.kind == GaussianTask::Kind::Eps10)
        return refine_private_eps10(task, N, ctx, ls);
    return extract_common(task, N, ctx, ls);
}

} // namespace gwci::gaussian
