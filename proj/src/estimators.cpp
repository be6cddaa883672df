// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "bdris/estimators.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bdris/decompositions.hpp"
#include "bdris/products.hpp"
#include "bdris/random.hpp"

namespace bdris
{

std::string IdentifiabilityReport::describe() const
{
    std::ostringstream s;
    s << "K*T>=N:" << (blocksTimesSlots ? "ok" : "FAIL") << " K*M_R>=N:" << (blocksTimesRx ? "ok" : "FAIL")
      << " T>=M_T:" << (pilotsFullRank ? "ok" : "FAIL") << " R>N/Q:" << (rankExceedsGroup ? "ok" : "no")
      << " K_min=" << kMin << " (N/T=" << kMinFromSlots << ", N/M_R=" << kMinFromRx << ")"
      << " K_min_full_tensor=" << kMinFullTensor;
    return s.str();
}

IdentifiabilityReport checkIdentifiability(const SystemConfig &cfg)
{
    cfg.validate();
    const Eigen::Index N = cfg.elements;
    const Eigen::Index nbar = cfg.groupSize();

    IdentifiabilityReport r;
    r.blocksTimesSlots = cfg.blocks * cfg.slots >= N;
    r.blocksTimesRx = cfg.blocks * cfg.rxAntennas >= N;
    r.pilotsFullRank = cfg.slots >= cfg.txAntennas;
    // a single-element group has only the per-group scalar ambiguity
    r.rankExceedsGroup = cfg.rank > nbar || nbar == 1;
    r.kMinFromSlots = static_cast<double>(N) / static_cast<double>(cfg.slots);
    r.kMinFromRx = static_cast<double>(N) / static_cast<double>(cfg.rxAntennas);
    // integer ceil of max(N/T, N/M_R)
    const Eigen::Index fromSlots = (N + cfg.slots - 1) / cfg.slots;
    const Eigen::Index fromRx = (N + cfg.rxAntennas - 1) / cfg.rxAntennas;
    r.kMin = std::max(fromSlots, fromRx);
    r.kMinFullTensor = nbar * nbar * cfg.groups;
    return r;
}

void PalsConfig::validate() const
{
    if (maxIterations < 1)
        throw UsageError("PalsConfig: maxIterations must be >= 1");
    if (!(threshold > 0.0))
        throw UsageError("PalsConfig: threshold must be > 0");
    if (starts < 1)
        throw UsageError("PalsConfig: starts must be >= 1");
}

std::string RankDiagnostics::describe() const
{
    std::ostringstream s;
    s << "m1=" << mode1Rank << "/" << requiredRank << ";m2=" << mode2Rank << "/" << requiredRank;
    return s.str();
}

namespace
{

void requireShapes(const CTensor3 &y, const TrainingDesign &d, const SystemConfig &cfg)
{
    cfg.validate();
    if (y.dim(1) != cfg.rxAntennas || y.dim(2) != cfg.slots || y.dim(3) != cfg.blocks)
        throw UsageError("estimator: received tensor must be M_R x T x K");
    if (d.X.rows() != cfg.slots || d.X.cols() != cfg.txAntennas || d.P1.rows() != cfg.elements ||
        d.P2.rows() != cfg.elements || d.PS.rows() != cfg.blocks || d.PS.cols() != d.P1.cols() ||
        d.P2.cols() != d.P1.cols())
        throw UsageError("estimator: training design does not match the configuration");
}

struct AlsRun
{
    CMat G, H;
    std::vector<double> trace;
    bool converged = false;
    RankDiagnostics ranks;
};

// Right-multiplication by M^+ for M = mask * (PS kr factor)^T.
struct MaskedSolve
{
    CMat rhsTimesPinv;
    Eigen::Index rank = 0;
};

MaskedSolve solveMasked(const CMat &Y, const CMat &mask, const CMat &PS, const CMat &factor, PalsConfig::Solver solver)
{
    if (solver == PalsConfig::Solver::Svd)
    {
        const auto p = pseudoInverse(CMat(mask * khatriRao(PS, factor).transpose()));
        return {Y * p.pinv, p.rank};
    }
    // M M^H = mask conj((PS kr F)^H (PS kr F)) mask^H, Y M^H = Y conj(PS kr F) mask^H
    const CMat gram = mask * khatriRaoGram(PS, factor).conjugate() * mask.adjoint();
    const auto p = gramPseudoInverse(gram);
    const CMat rhs = Y * khatriRao(PS, factor).conjugate() * mask.adjoint();
    return {rhs * p.pinv, p.rank};
}

AlsRun runAls(const CMat &Y1, const CMat &Y2, const CMat &Y3, double refEnergy, const TrainingDesign &d,
              const SystemConfig &cfg, const PalsConfig &pals, std::uint64_t seed)
{
    Rng rng(seed);
    AlsRun run;
    run.H = complexGaussian(cfg.txAntennas, cfg.elements, rng);
    run.ranks.requiredRank = cfg.elements;
    const CMat Xh = d.X.adjoint();

    const auto error = [&](const CMat &G, const CMat &H) {
        const CMat recon = d.PS * khatriRao(CMat(d.X * H * d.P2), CMat(G * d.P1)).transpose();
        const double residual = (Y3 - recon).squaredNorm();
        return refEnergy > 0.0 ? residual / refEnergy : residual;
    };

    double previous = std::numeric_limits<double>::infinity();
    CMat prevG, prevH;
    for (int i = 1; i <= pals.maxIterations; ++i)
    {
        const auto g = solveMasked(Y1, d.P1, d.PS, CMat(d.X * run.H * d.P2), pals.solver);
        run.G = g.rhsTimesPinv;

        const auto h = solveMasked(Y2, d.P2, d.PS, CMat(run.G * d.P1), pals.solver);
        run.H = Xh * h.rhsTimesPinv;

        run.ranks.mode1Rank = g.rank;
        run.ranks.mode2Rank = h.rank;

        double eps = error(run.G, run.H);
        if (pals.extrapolate && i > 2 && eps > 0.0)
        {
            const double step = std::cbrt(static_cast<double>(i)) - 1.0;
            CMat G = run.G + step * (run.G - prevG);
            CMat H = run.H + step * (run.H - prevH);
            const double tried = error(G, H);
            if (tried < eps)
            {
                run.G = std::move(G);
                run.H = std::move(H);
                eps = tried;
            }
        }
        if (!std::isfinite(eps))
            throw NumericalError("palsEstimate: non-finite reconstruction error at iteration " + std::to_string(i));
        run.trace.push_back(eps);

        if (eps == 0.0 || std::abs(eps - previous) <= pals.threshold)
        {
            run.converged = true;
            break;
        }
        previous = eps;
        prevG = run.G;
        prevH = run.H;
    }
    return run;
}

} // namespace

EstimateResult palsEstimate(const CTensor3 &y, const TrainingDesign &design, const SystemConfig &cfg,
                            const PalsConfig &pals)
{
    pals.validate();
    requireShapes(y, design, cfg);
    if (!y.allFinite())
        throw NumericalError("palsEstimate: received tensor has non-finite entries");

    const auto report = checkIdentifiability(cfg);
    if (!report.alsFeasible() && !pals.force)
        throw IdentifiabilityError("palsEstimate: " + report.describe());

    const CMat Y1 = unfold(y, 1);
    const CMat Y2 = unfold(y, 2);
    const CMat Y3 = unfold(y, 3);
    const double refEnergy = Y3.squaredNorm();

    EstimateResult best;
    double bestError = std::numeric_limits<double>::infinity();
    for (int s = 0; s < pals.starts; ++s)
    {
        auto run = runAls(Y1, Y2, Y3, refEnergy, design, cfg, pals,
                          deriveSeed(pals.initSeed, SeedPurpose::Init, {static_cast<std::uint64_t>(s)}));
        const double final = run.trace.back();
        if (s == 0 || final < bestError)
        {
            bestError = final;
            best.G = std::move(run.G);
            best.H = std::move(run.H);
            best.errorTrace = std::move(run.trace);
            best.converged = run.converged;
            best.ranks = run.ranks;
            best.bestStart = s;
        }
    }
    best.iterations = static_cast<int>(best.errorTrace.size());
    best.Gbar = best.G * design.P1;
    best.Hbar = best.H * design.P2;
    best.equivalentMode = !report.rankExceedsGroup;
    return best;
}

namespace
{

// Orthonormal basis of the null space of a wide matrix (columns of V past the rank).
CMat nullBasis(const CMat &m)
{
    Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullV);
    const auto &s = svd.singularValues();
    const double tol = static_cast<double>(std::max(m.rows(), m.cols())) * std::numeric_limits<double>::epsilon() *
                       (s.size() ? s[0] : 0.0);
    Eigen::Index rank = 0;
    while (rank < s.size() && s[rank] > tol)
        ++rank;
    return svd.matrixV().rightCols(m.cols() - rank);
}

// Column scaling d such that block * diag(d) has its rows in the row space
// of the spatial factor, i.e. block * diag(z) * d = 0 for every null vector z.
CVec rowSpaceScaling(const CMat &block, const CMat &null)
{
    const Eigen::Index R = block.cols();
    CMat system(block.rows() * null.cols(), R);
    for (Eigen::Index j = 0; j < null.cols(); ++j)
        system.middleRows(j * block.rows(), block.rows()) = block * null.col(j).asDiagonal();
    Eigen::JacobiSVD<CMat> svd(system, Eigen::ComputeFullV);
    return svd.matrixV().col(R - 1);
}

} // namespace

EstimateResult krfEstimate(const CTensor3 &y, const TrainingDesign &design, const SystemConfig &cfg)
{
    requireShapes(y, design, cfg);
    const Eigen::Index R = design.PS.cols();
    const Eigen::Index rank = cfg.rank;
    if (cfg.blocks < R)
        throw IdentifiabilityError("krfEstimate: K=" + std::to_string(cfg.blocks) + " < R*Q=" + std::to_string(R) +
                                   ", the mode-3 LS step is underdetermined");
    const auto psPinv = pseudoInverse(design.PS);
    if (psPinv.rank < R)
        throw IdentifiabilityError("krfEstimate: block factor matrix is rank deficient (" +
                                   std::to_string(psPinv.rank) + " < " + std::to_string(R) + ")");

    const Eigen::Index Mr = cfg.rxAntennas;
    const Eigen::Index T = cfg.slots;
    const CMat Z = (psPinv.pinv * unfold(y, 3)).transpose(); // (X H P2) kr (G P1), M_R T x RQ

    EstimateResult out;
    out.iterations = 1;
    out.converged = true;
    CMat Gbar(Mr, R), Fbar(T, R);
    for (Eigen::Index r = 0; r < R; ++r)
    {
        const Eigen::Map<const CMat> column(Z.col(r).data(), Mr, T);
        Rank1Factors<cdouble> f;
        try
        {
            f = rank1Factor(column);
        }
        catch (const DegenerateInputError &)
        {
            throw DegenerateInputError("krfEstimate: column " + std::to_string(r) +
                                       " of the Khatri-Rao estimate is zero");
        }
        Gbar.col(r) = f.u;
        Fbar.col(r) = f.v;
        out.rank1Ratios.push_back(f.sigma1 > 0.0 ? f.sigma2 / f.sigma1 : 0.0);
    }

    const auto report = checkIdentifiability(cfg);
    out.equivalentMode = !report.rankExceedsGroup;
    if (!out.equivalentMode)
    {
        // Fix the per-column scaling left by the rank-1 step so that the
        // equivalent channels lie in the row spaces of the masks; only a
        // per-group scalar remains afterwards.
        const bool useRx = Mr >= T;
        const CMat null = nullBasis(useRx ? design.P1bar : design.P2bar);
        for (Eigen::Index q = 0; q < cfg.groups && null.cols() > 0; ++q)
        {
            auto g = Gbar.middleCols(q * rank, rank);
            auto f = Fbar.middleCols(q * rank, rank);
            CVec d = rowSpaceScaling(useRx ? CMat(g) : CMat(f), null);
            if ((d.array().abs() == 0.0).any())
                throw DegenerateInputError("krfEstimate: scaling correction has a zero entry");
            if (!useRx)
                d = d.cwiseInverse();
            g = g * d.asDiagonal();
            f = f * d.cwiseInverse().asDiagonal();
        }
    }

    out.Gbar = Gbar;
    out.Hbar = design.X.adjoint() * Fbar;
    out.G = Gbar * pseudoInverse(design.P1).pinv;
    out.H = out.Hbar * pseudoInverse(design.P2).pinv;
    out.ranks.requiredRank = R;
    out.ranks.mode1Rank = psPinv.rank;
    out.ranks.mode2Rank = psPinv.rank;
    return out;
}

CascadedEstimate lsCascadedEstimate(const CTensor3 &y, const ScatteringTensorSet &scat, const CMat &X,
                                    const SystemConfig &cfg)
{
    cfg.validate();
    const Eigen::Index nbar = cfg.groupSize();
    const Eigen::Index width = nbar * nbar * cfg.groups;
    if (cfg.blocks < width)
        throw IdentifiabilityError("lsCascadedEstimate: K=" + std::to_string(cfg.blocks) +
                                   " < (N/Q)^2 Q=" + std::to_string(width));
    if (y.dim(1) != cfg.rxAntennas || y.dim(2) != X.rows() || y.dim(3) != cfg.blocks ||
        static_cast<Eigen::Index>(scat.groups.size()) != cfg.groups || scat.blocks() != cfg.blocks)
        throw UsageError("lsCascadedEstimate: inputs do not match the configuration");

    const auto xt = pseudoInverse(CMat(X.transpose()));
    if (xt.rank < X.cols())
        throw IdentifiabilityError("lsCascadedEstimate: pilot matrix is not full column rank");

    const Eigen::Index K = cfg.blocks;
    CMat W(cfg.rxAntennas * X.cols(), K);
    CMat S(K, width);
    for (Eigen::Index k = 0; k < K; ++k)
    {
        W.col(k) = vec(CMat(y.slice(k) * xt.pinv));
        for (Eigen::Index q = 0; q < cfg.groups; ++q)
            S.row(k).segment(q * nbar * nbar, nbar * nbar) = vec(CMat(scat.groups[q].slice(k))).transpose();
    }

    const auto st = pseudoInverse(CMat(S.transpose()));
    if (st.rank < width)
        throw IdentifiabilityError("lsCascadedEstimate: training matrix rank " + std::to_string(st.rank) + " < " +
                                   std::to_string(width));
    return {W * st.pinv, st.rank};
}

} // namespace bdris
