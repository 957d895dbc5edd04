#include "gwci/dsbs.hpp"
#include "gwci/error.hpp"
#include "gwci/harness.hpp"

namespace gwci::harness {

namespace {

dsbs::DsbsPoint dsbs_point(const ExperimentConfig& c)
{
    using K = dsbs::DsbsPoint::Kind;
    dsbs::DsbsPoint p;
    p.delta1 = c.delta1;
    p.delta2 = c.delta2;
    p.beta = c.beta;
    p.d1 = c.d1;
    if (c.point == "A")
        p.kind = K::A;
    else if (c.point == "G")
        p.kind = K::G;
    else if (c.point == "AG")
        p.kind = K::AG;
    else if (c.point == "GB")
        p.kind = K::GB;
    else if (c.point == "eps10")
        p.kind = K::LossyE10;
    else if (c.point == "eps2")
        p.kind = K::LossyE2;
    else if (c.point == "eps3")
        p.kind = K::LossyE3;
    else
        throw ConfigError("unknown dsbs point '" + c.point + "'");
    return p;
}

gaussian::GaussianTask gaussian_task(const ExperimentConfig& c)
{
    using K = gaussian::GaussianTask::Kind;
    gaussian::GaussianTask t;
    t.rho = c.rho;
    t.L = c.L;
    t.delta1 = c.delta1;
    t.delta2 = c.delta2;
    if (c.scenario == Scenario::GaussianL)
        t.kind = K::CommonL;
    else if (c.point == "common")
        t.kind = K::Common;
    else if (c.point == "eps10")
        t.kind = K::Eps10;
    else if (c.point == "eps2")
        t.kind = K::Eps2;
    else if (c.point == "eps3")
        t.kind = K::Eps3;
    else
        throw ConfigError("unknown gaussian point '" + c.point + "'");
    return t;
}

} // namespace

std::vector<ExperimentRecord> run_experiment(const ExperimentConfig& c, polar::ProfileStore& store, bool construct_only)
{
    validate(c);
    PipelineContext ctx = make_context(c, &store);
    if (construct_only)
        ctx.blocks = 0;
    std::vector<ExperimentRecord> out;
    for (std::size_t N : c.N) {
        ExperimentRecord rec;
        switch (c.scenario) {
        case Scenario::DsbsLossless:
        case Scenario::DsbsLossy:
            rec = dsbs::run_dsbs_pipeline(dsbs_point(c), dsbs::DsbsModel(c.a0), N, ctx);
            break;
        case Scenario::Gaussian:
        case Scenario::GaussianL: {
            gaussian::LatticeSettings ls;
            ls.target_flatness = c.target_flatness;
            ls.levels = c.levels;
            rec = gaussian::run_gaussian_pipeline(gaussian_task(c), N, ctx, ls);
            break;
        }
        default:
            throw ConfigError(std::string("scenario ") + scenario_name(c.scenario) + " has no coding pipeline");
        }
        rec.scenario = scenario_name(c.scenario);
        rec.config_hash = c.hash();
        out.push_back(std::move(rec));
    }
    return out;
}

std::vector<gaussian::LemmaReport> run_lemma_check(const ExperimentConfig& c)
{
    using namespace gaussian;
    validate(c);
    std::vector<LemmaReport> out;
    GaussianPairModel pm(c.rho);
    double s1 = scale_for_flatness(pair_bound_sigma(pm), c.lemma_epsilon);
    out.push_back(verify_pair_bound(pm, s1, c.resolution));

    LGaussianModel lm(c.L, c.rho_L);
    double s2 = scale_for_flatness(multi_bound_sigma(lm), c.lemma_epsilon);
    out.push_back(verify_multi_bound(lm, s2, c.L == 2 ? c.resolution : c.resolution_3d, c.mc_samples));

    if (classify_gaussian(c.delta1, c.delta2, pm) == Region::E2) {
        double s3 = scale_for_flatness(eps2_bound_sigma(c.delta1, c.delta2, pm), c.lemma_epsilon);
        out.push_back(verify_eps2_bound(c.delta1, c.delta2, pm, s3, c.resolution));
    }
    return out;
}

} // namespace gwci::harness
