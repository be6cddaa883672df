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

#include <functional>
#include <ostream>

#include "bdris/decompositions.hpp"
#include "bdris/harness.hpp"
#include "bdris/products.hpp"
#include "bdris/random.hpp"

namespace bdris
{

namespace
{

CTensor3 randomTensor(Eigen::Index a, Eigen::Index b, Eigen::Index c, Rng &rng)
{
    CTensor3 t(a, b, c);
    const CMat v = complexGaussian(t.size(), 1, rng);
    t.data() = v.col(0);
    return t;
}

bool foldRoundTrip()
{
    Rng rng(11);
    const auto t = randomTensor(3, 4, 5, rng);
    for (int mode = 1; mode <= 3; ++mode)
        if (!(fold(unfold(t, mode), mode, t.dims()) == t))
            return false;
    return true;
}

bool parafacUnfoldings()
{
    Rng rng(12);
    const CMat A = complexGaussian(3, 2, rng), B = complexGaussian(4, 2, rng), C = complexGaussian(5, 2, rng);
    const auto t = nModeProduct(nModeProduct(nModeProduct(identityTensor(2), A, 1), B, 2), C, 3);
    return (unfold(t, 1) - A * khatriRao(C, B).transpose()).norm() < 1e-12 &&
           (unfold(t, 2) - B * khatriRao(C, A).transpose()).norm() < 1e-12 &&
           (unfold(t, 3) - C * khatriRao(B, A).transpose()).norm() < 1e-12;
}

bool penrose()
{
    Rng rng(13);
    const CMat m = complexGaussian(4, 7, rng);
    const CMat p = pseudoInverse(m).pinv;
    return (m * p * m - m).norm() < 1e-10 && (p * m * p - p).norm() < 1e-10 &&
           (CMat(m * p).adjoint() - m * p).norm() < 1e-10 && (CMat(p * m).adjoint() - p * m).norm() < 1e-10;
}

bool modelEquivalence()
{
    SystemConfig cfg;
    const auto ch = generateChannels(cfg, 21);
    const auto d = designTraining(cfg, 22);
    const auto a = synthesizeSlicewise(ch, buildScattering(d, cfg), d.X);
    const auto b = synthesizeTensor(ch, d);
    return (a - b).norm() <= 1e-10 * b.norm();
}

bool noiselessTrial(Method method, const SystemConfig &sys, double tol)
{
    ExperimentConfig cfg;
    cfg.system = sys;
    const auto r = runTrial(cfg, method, kNoiselessSnr, 0, 0);
    const double err = method == Method::Ls ? r.nmseCBlockwise : r.nmseCColumnwise;
    return r.ok() && err <= tol;
}

bool determinism()
{
    ExperimentConfig cfg;
    const auto a = runTrial(cfg, Method::Pals, 10.0, 2, 3);
    const auto b = runTrial(cfg, Method::Pals, 10.0, 2, 3);
    return a.seed == b.seed && a.nmseG == b.nmseG && a.nmseH == b.nmseH && a.iterations == b.iterations;
}

bool complexityCounts()
{
    return trainingParameterCount(4, 10, 5, 1, TrainingScheme::Parafac).perGroup == 90 &&
           trainingParameterCount(4, 10, 5, 1, TrainingScheme::FullTensor).perGroup == 160;
}

} // namespace

bool runSelfTest(std::ostream &os)
{
    SystemConfig krf;
    krf.elements = 8;
    krf.groups = 2;
    krf.rank = 5;
    krf.txAntennas = krf.slots = 4;
    krf.rxAntennas = 8;
    krf.blocks = 16;

    SystemConfig ls;
    ls.elements = 4;
    ls.groups = 2;
    ls.txAntennas = ls.slots = 2;
    ls.rxAntennas = 4;
    ls.blocks = 8;
    ls.rank = 2;

    const std::vector<std::pair<const char *, std::function<bool()>>> checks = {
        {"fold(unfold(T)) == T", foldRoundTrip},
        {"PARAFAC unfoldings", parafacUnfoldings},
        {"pseudo-inverse Penrose conditions", penrose},
        {"slicewise == tensor synthesis", modelEquivalence},
        {"pals noiseless recovery", [] { return noiselessTrial(Method::Pals, SystemConfig{}, 1e-8); }},
        {"krf noiseless recovery", [&] { return noiselessTrial(Method::Krf, krf, 1e-8); }},
        {"ls noiseless recovery", [&] { return noiselessTrial(Method::Ls, ls, 1e-10); }},
        {"trial determinism", determinism},
        {"parameter counts 90 / 160", complexityCounts},
    };

    bool all = true;
    for (const auto &[name, fn] : checks)
    {
        bool ok = false;
        try
        {
            ok = fn();
        }
        catch (const std::exception &e)
        {
            os << "  error: " << e.what() << "\n";
        }
        os << (ok ? "[PASS] " : "[FAIL] ") << name << "\n";
        all = all && ok;
    }
    return all;
}

} // namespace bdris
