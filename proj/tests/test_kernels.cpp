// Copyright 2026 The cauchyloc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "cauchyloc/kernels.hpp"
#include "cauchyloc/rng.hpp"

using namespace cauchyloc;

namespace {

FourVector onshell(const Vec3 &p, double m = 1.0) { return {lift(p, m), p}; }

std::vector<Vec3> gaussian_sample(std::size_t count, std::uint64_t seed, double scale) {
    CounterRng rng(seed, 0x6772616du);
    std::vector<Vec3> out(count);
    for (std::size_t i = 0; i < count; ++i) {
        for (int a = 0; a < 3; ++a) {
            // Box-Muller from two counter draws.
            const double u1 = std::max(1e-12, rng.uniform(6 * i + 2 * a));
            const double u2 = rng.uniform(6 * i + 2 * a + 1);
            out[i][a] = scale * std::sqrt(-2.0 * std::log(u1)) *
                        std::cos(2.0 * M_PI * u2);
        }
    }
    return out;
}

} // namespace

TEST_CASE("g_eval closed forms") {
    CausalKernelSpec g32(PowerLaw{1.5}, 1.0);
    CausalKernelSpec g2(PowerLaw{2.0}, 1.0);
    CausalKernelSpec g3(PowerLaw{3.0}, 1.0);
    CHECK(g_eval(g32, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g_eval(g2, 3.0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g_eval(g3, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g_eval(g32, 3.0) == doctest::Approx(std::pow(0.5, 1.5)).epsilon(1e-14));

    CausalKernelSpec sp(ShiftedPower{1.0, 2}, 1.0);
    CHECK(g_eval(sp, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(g_eval(sp, 3.0) == doctest::Approx(0.25).epsilon(1e-15));

    CausalKernelSpec mix(
        Convex{{0.5, 0.5}, {g32, g3}}, 1.0);
    CHECK(g_eval(mix, 2.0) ==
          doctest::Approx(0.5 * g_eval(g32, 2.0) + 0.5 * g_eval(g3, 2.0)).epsilon(1e-14));

    CHECK_THROWS_AS(g_eval(g32, 0.5), std::domain_error);
}

TEST_CASE("kernel spec validation") {
    CHECK_THROWS_AS(CausalKernelSpec(PowerLaw{1.0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(CausalKernelSpec(PowerLaw{1.5}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(CausalKernelSpec(ShiftedPower{-1.0, 2}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(CausalKernelSpec(ShiftedPower{0.5, 1}, 1.0), std::invalid_argument);
    CausalKernelSpec g32(PowerLaw{1.5}, 1.0);
    CHECK_THROWS_AS(CausalKernelSpec(Convex{{0.5, 0.4}, {g32, g32}}, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(CausalKernelSpec(FiniteRank{}, 1.0), std::invalid_argument);
}

TEST_CASE("kernel_T: diagonal one, symmetric, off-shell rejected") {
    CausalKernelSpec g32(PowerLaw{1.5}, 1.0);
    const FourVector p = onshell({0.4, -0.2, 0.1});
    const FourVector k = onshell({-0.3, 0.5, 0.0});
    CHECK(kernel_T(g32, p, p) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(kernel_T(g32, k, p) == doctest::Approx(kernel_T(g32, p, k)).epsilon(1e-14));
    CHECK(kernel_T(g32, k, p) > 0.0);
    CHECK_THROWS_AS(kernel_T(g32, {1.5, {0.4, 0, 0}}, p), std::invalid_argument);
}

TEST_CASE("kernel_M: diagonal one in matching frames, symmetric") {
    const FourVector n{1.0, {0, 0, 0}};
    const FourVector p = onshell({0.4, -0.2, 0.1});
    const FourVector q = onshell({-0.3, 0.5, 0.0});
    CHECK(kernel_M(n, n, p, p) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(kernel_M(n, n, q, p) == doctest::Approx(kernel_M(n, n, p, q)).epsilon(1e-14));
    // Boosted frame vector.
    const double chi = 0.3;
    const FourVector nb{std::cosh(chi), {std::sinh(chi), 0, 0}};
    CHECK(kernel_M(nb, n, q, p) == doctest::Approx(kernel_M(nb, n, p, q)).epsilon(1e-13));
    CHECK_THROWS_AS(kernel_M({1.0, {1.0, 0, 0}}, n, p, q), std::invalid_argument);
}

TEST_CASE("current_j reduces to the on-shell momentum on the diagonal") {
    CausalKernelSpec g3(PowerLaw{3.0}, 1.0);
    const FourVector p = onshell({0.4, -0.2, 0.1});
    const FourVector j = current_j(g3, p, p);
    CHECK(j.x0 == doctest::Approx(p.x0).epsilon(1e-14));
    for (int a = 0; a < 3; ++a) {
        CHECK(j.xs[a] == doctest::Approx(p.xs[a]).epsilon(1e-14));
    }
    // Off-diagonal: future-directed timelike average scaled by g < 1.
    const FourVector k = onshell({-0.3, 0.5, 0.0});
    const FourVector jo = current_j(g3, k, p);
    const double g = g_eval(g3, -mdot(k, p));
    CHECK(jo.x0 == doctest::Approx(0.5 * (k.x0 + p.x0) * g).epsilon(1e-14));
}

TEST_CASE("gram_psd_check passes for causal kernels") {
    const auto sample = gaussian_sample(60, 7, 0.8);
    for (const auto &spec :
         {CausalKernelSpec(PowerLaw{1.5}, 1.0), CausalKernelSpec(PowerLaw{3.0}, 1.0),
          CausalKernelSpec(ShiftedPower{1.0, 2}, 1.0)}) {
        const auto r = gram_psd_check(momentum_kernel_T(spec), sample, 1e-8);
        CHECK(r.pass);
        CHECK(r.min_eig >= -1e-8 * std::max(1.0, r.max_eig));
    }
    const FourVector n{1.0, {0, 0, 0}};
    const auto rm = gram_psd_check(momentum_kernel_M(n, n, 1.0), sample, 1e-8);
    CHECK(rm.pass);
}

TEST_CASE("constant kernel fails the Gram criterion") {
    // K(p, q) = (p0 + q0) / (2 sqrt(p0 q0)) has a negative 2x2 determinant
    // for distinct nodes, so the smallest eigenvalue is negative.
    const MomentumKernel flat_g = [](const Vec3 &p, const Vec3 &q) {
        const double ep = lift(p, 1.0), eq = lift(q, 1.0);
        return Complex((ep + eq) / (2.0 * std::sqrt(ep * eq)), 0.0);
    };
    const std::vector<Vec3> two{{0.0, 0.0, 0.0}, {1.2, 0.0, 0.0}};
    const double k01 = flat_g(two[0], two[1]).real();
    CHECK(k01 * k01 > 1.0); // det = 1 - k01^2 < 0
    const auto r = gram_psd_check(flat_g, two, 1e-8);
    CHECK_FALSE(r.pass);
    CHECK(r.min_eig < 0.0);
}

TEST_CASE("gram_psd_check input validation") {
    CausalKernelSpec g32(PowerLaw{1.5}, 1.0);
    const auto kern = momentum_kernel_T(g32);
    CHECK_THROWS_AS(gram_psd_check(kern, {}, 1e-8), std::invalid_argument);
    CHECK_THROWS_AS(gram_psd_check(kern, std::vector<Vec3>(401), 1e-8),
                    std::invalid_argument);
    const MomentumKernel skew = [](const Vec3 &p, const Vec3 &q) {
        return Complex(0.0, p[0] - 2.0 * q[0]);
    };
    CHECK_THROWS_AS(gram_psd_check(skew, {{0.1, 0, 0}, {0.7, 0, 0}}, 1e-8),
                    std::runtime_error);
}

TEST_CASE("finite-rank kernel: unit diagonal and exact PSD") {
    FiniteRank fr;
    fr.components.push_back(
        [](const Vec3 &p) { return Complex(std::exp(-0.5 * dot3(p, p)), 0.0); });
    fr.components.push_back(
        [](const Vec3 &p) { return Complex(p[0] * std::exp(-0.5 * dot3(p, p)), 0.0); });
    CausalKernelSpec spec(FiniteRank{fr}, 1.0);
    const auto kern = momentum_kernel_T(spec);
    CHECK(kern({0.3, 0.1, -0.2}, {0.3, 0.1, -0.2}).real() == doctest::Approx(1.0));
    const auto sample = gaussian_sample(40, 3, 0.8);
    const auto r = gram_psd_check(kern, sample, 1e-8);
    CHECK(r.pass);
}

TEST_CASE("integral positivity agrees in sign with the Gram criterion") {
    CausalKernelSpec g32(PowerLaw{1.5}, 1.0);
    const auto f = [](const Vec3 &p) {
        return Complex(std::exp(-2.0 * dot3(p, p)), 0.0);
    };
    const double v = integral_positivity_check(momentum_kernel_T(g32), f, 1.5, 12);
    CHECK(v > 0.0);
    CHECK_THROWS_AS(integral_positivity_check(momentum_kernel_T(g32), f, 1.5, 3),
                    std::invalid_argument);
}

TEST_CASE("kappa at the rest point: frozen curvature values") {
    CausalKernelSpec g32(PowerLaw{1.5}, 1.0);
    CausalKernelSpec g3(PowerLaw{3.0}, 1.0);
    const FourVector n{1.0, {0, 0, 0}};
    CHECK(kappa_eval(momentum_kernel_T(g32), {0, 0, 0}, 0) ==
          doctest::Approx(0.75).epsilon(1e-6));
    CHECK(kappa_eval(momentum_kernel_T(g3), {0, 0, 0}, 0) ==
          doctest::Approx(1.5).epsilon(1e-6));
    CHECK(kappa_eval(momentum_kernel_M(n, n, 1.0), {0, 0, 0}, 0) ==
          doctest::Approx(0.5).epsilon(1e-6));
    CHECK(kappa_eval(momentum_kernel_M(n, n, 1.0), {0.5, 0, 0}, 0) ==
          doctest::Approx(0.32).epsilon(1e-5));
}

TEST_CASE("kappa of a rank-1 phase kernel is the squared phase slope") {
    // u(p) = exp(i a p_x) gives K(p, q) = exp(i a (q_x - p_x)), so the
    // mixed second derivative at coincidence is exactly a^2.
    const double a = 0.7;
    const MomentumKernel rank1 = [a](const Vec3 &p, const Vec3 &q) {
        return std::exp(Complex(0.0, a * (q[0] - p[0])));
    };
    CHECK(kappa_eval(rank1, {0.2, -0.4, 0.1}, 0) == doctest::Approx(a * a).epsilon(1e-6));
    CHECK(kappa_eval(rank1, {0.2, -0.4, 0.1}, 1) == doctest::Approx(0.0).epsilon(1e-8));
}
