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

#include "cauchyloc/states.hpp"

using namespace cauchyloc;

namespace {

MomentumState packet_a() {
    MassShellGrid g(1.0, 2.4, 16);
    return MomentumState(AnalyticGaussian{{0, 0, 0}, {0.35, 0.35, 0.35}, {0, 0, 0}}, g);
}

MomentumState packet_c() {
    MassShellGrid g(1.0, 3.2, 16);
    return MomentumState(AnalyticGaussian{{0, 0, 0}, {0.5, 0.5, 0.5}, {0.6, 0, 0}}, g);
}

} // namespace

TEST_CASE("mass-shell lift") {
    CHECK(lift({0, 0, 0}, 1.0) == 1.0);
    CHECK(lift({3, 0, 4}, 0.5) == doctest::Approx(std::sqrt(25.25)).epsilon(1e-15));
    CHECK_THROWS_AS(lift({0, 0, 0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(lift({0, 0, 0}, -1.0), std::invalid_argument);
}

TEST_CASE("grid geometry: midpoint nodes and invariant weights") {
    MassShellGrid g(1.0, 2.0, 4);
    CHECK(g.pitch() == 1.0);
    CHECK(g.size() == 64);
    CHECK(g.axis_coord(0) == doctest::Approx(-1.5));
    CHECK(g.axis_coord(3) == doctest::Approx(1.5));
    // Node layout: last axis fastest.
    CHECK(g.node(1)[2] == doctest::Approx(-0.5));
    CHECK(g.node(1)[0] == doctest::Approx(-1.5));
    CHECK(g.node(4)[1] == doctest::Approx(-0.5));
    const Vec3 p = g.node(7);
    CHECK(g.weight(7) == doctest::Approx(1.0 / lift(p, 1.0)).epsilon(1e-15));
    CHECK(g.cell_volume() == doctest::Approx(1.0));
}

TEST_CASE("states are unit-normalized on the grid") {
    const auto psi = packet_a();
    double n2 = 0.0;
    for (std::size_t i = 0; i < psi.values().size(); ++i) {
        n2 += std::norm(psi.values()[i]) * psi.grid().weight(i);
    }
    CHECK(n2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(inner(psi, psi) - 1.0) < 1e-12);
}

TEST_CASE("phi and psi representations differ by sqrt(p0)") {
    const auto psi = packet_a();
    const Vec3 p{0.3, -0.1, 0.2};
    const Complex a = psi.psi_at(p);
    const Complex b = psi.phi_at(p);
    CHECK(std::abs(a - b * std::sqrt(lift(p, 1.0))) < 1e-14);
}

TEST_CASE("compact bump profile is 1 inside, 0 outside") {
    MassShellGrid g(1.0, 2.4, 12);
    MomentumState psi(CompactBump{{0, 0, 0}, 0.5, 1.0}, g);
    CHECK(std::abs(inner(psi, psi) - 1.0) < 1e-12);
    // Ratio of samples inside the plateau matches the measure weights.
    const Complex v0 = psi.psi_at({0.0, 0.0, 0.0});
    const Complex v1 = psi.psi_at({0.2, 0.0, 0.0});
    // psi = sqrt(p0) phi and phi is constant on the plateau.
    CHECK(std::abs(v1 / v0 - std::sqrt(lift({0.2, 0, 0}, 1.0))) < 1e-12);
    CHECK(std::abs(psi.psi_at({1.5, 0.0, 0.0})) == 0.0);
}

TEST_CASE("grid samples renormalize and bake translations") {
    MassShellGrid g(1.0, 2.0, 8);
    std::vector<Complex> vals(g.size());
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const Vec3 p = g.node(i);
        vals[i] = std::exp(-dot3(p, p));
    }
    MomentumState psi(GridSamples{vals}, g);
    CHECK(std::abs(inner(psi, psi) - 1.0) < 1e-12);

    const PoincareElement tr = PoincareElement::translation({0.0, {0.7, 0, 0}});
    const MomentumState moved = poincare_act(tr, psi);
    CHECK(std::abs(inner(moved, moved) - 1.0) < 1e-12);
    // A pure translation multiplies by a phase node by node.
    const FourVector k = g.onshell(100);
    const Complex phase = std::exp(Complex(0.0, -mdot(k, tr.y)));
    CHECK(std::abs(moved.values()[100] - psi.values()[100] * phase) < 1e-12);
}

TEST_CASE("poincare_act composes exactly for analytic states") {
    const auto psi = packet_a();
    const PoincareElement b = PoincareElement::boost_x(0.2);
    const PoincareElement r = PoincareElement::rotation_z(0.5);
    const MomentumState one = poincare_act(b, poincare_act(r, psi));
    const MomentumState two = poincare_act(b.compose(r), psi);
    for (std::size_t i = 0; i < one.values().size(); i += 97) {
        CHECK(std::abs(one.values()[i] - two.values()[i]) < 1e-10);
    }
    // Round trip returns the original samples.
    const MomentumState back = poincare_act(b.inverse(), poincare_act(b, psi));
    double worst = 0.0;
    for (std::size_t i = 0; i < back.values().size(); ++i) {
        worst = std::max(worst, std::abs(back.values()[i] - psi.values()[i]));
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("boost preserves the invariant norm") {
    const auto psi = packet_a();
    const MomentumState boosted = poincare_act(PoincareElement::boost_x(0.3), psi);
    CHECK(std::abs(inner(boosted, boosted) - 1.0) < 1e-3);
}

TEST_CASE("covariant_wave: translation covariance") {
    const auto psi = packet_a();
    const FourVector y{0.3, {0.1, -0.2, 0.4}};
    const MomentumState moved = poincare_act(PoincareElement::translation(y), psi);
    const FourVector x{0.5, {0.7, 0.1, -0.3}};
    const FourVector xm{x.x0 - y.x0,
                        {x.xs[0] - y.xs[0], x.xs[1] - y.xs[1], x.xs[2] - y.xs[2]}};
    const Complex lhs = covariant_wave(moved, x);
    const Complex rhs = covariant_wave(psi, xm);
    CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("anomalous_wave gradient matches finite differences") {
    const auto psi = packet_a();
    const FourVector n{1.0, {0, 0, 0}};
    const FourVector x{0.2, {0.4, -0.1, 0.3}};
    const double h = 1e-4;
    const auto w = anomalous_wave(psi, n, x);
    // Chart component 1 (lower index equals the spatial derivative).
    FourVector xp = x, xm = x;
    xp.xs[0] += h;
    xm.xs[0] -= h;
    const Complex fd =
        (anomalous_wave(psi, n, xp).value - anomalous_wave(psi, n, xm).value) / (2.0 * h);
    CHECK(std::abs(w.grad[1] - fd) < 1e-6);
    // Time component: lower index 0 is minus the time derivative generator i p_0.
    FourVector tp = x, tm = x;
    tp.x0 += h;
    tm.x0 -= h;
    const Complex fd0 =
        (anomalous_wave(psi, n, tp).value - anomalous_wave(psi, n, tm).value) / (2.0 * h);
    CHECK(std::abs(w.grad[0] - fd0) < 1e-6);
}

TEST_CASE("nw_position_density is nonnegative and integrates to one") {
    const auto psi = packet_a();
    const auto S = CauchySurfaceGraph::flat(0.0);
    const NwSynth synth(psi, 0.0);
    const int n = 36;
    const double L = 6.0;
    const double dx = 2.0 * L / n;
    double total = 0.0;
    double minv = 1.0;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            for (int c = 0; c < n; ++c) {
                const Vec3 x{-L + (a + 0.5) * dx, -L + (b + 0.5) * dx, -L + (c + 0.5) * dx};
                const double rho = synth(x);
                minv = std::min(minv, rho);
                total += rho;
            }
        }
    }
    total *= dx * dx * dx;
    CHECK(minv >= 0.0);
    CHECK(total == doctest::Approx(1.0).epsilon(2e-3));
    // The batch evaluator agrees with the direct sum.
    const Vec3 probe{0.37, -0.81, 0.12};
    CHECK(synth(probe) == doctest::Approx(nw_position_density(psi, S, probe)).epsilon(1e-12));
}

TEST_CASE("nw_position_density requires an untilted flat slice") {
    const auto psi = packet_a();
    const auto tilted = CauchySurfaceGraph::flat(0.0, {0.3, 0, 0});
    CHECK_THROWS_AS(nw_position_density(psi, tilted, {0, 0, 0}), std::invalid_argument);
}

TEST_CASE("nw_expectation recovers the packet center") {
    const auto psi = packet_c();
    double im = 0.0;
    CHECK(nw_expectation(psi, 0, &im) == doctest::Approx(0.6).epsilon(1e-8));
    CHECK(std::abs(im) < 1e-10);
    CHECK(nw_expectation(psi, 1) == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(nw_expectation(psi, 2) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("nw_expectation shifts under translation") {
    const auto psi = packet_a();
    const MomentumState moved =
        poincare_act(PoincareElement::translation({0.0, {0.25, 0, 0}}), psi);
    CHECK(nw_expectation(moved, 0) == doctest::Approx(0.25).epsilon(1e-7));
}

TEST_CASE("truncation diagnostics") {
    const auto psi = packet_a();
    CHECK(psi.diagnostics().truncation_loss < 1e-6);
    CHECK_FALSE(psi.diagnostics().truncation_warning);
    // A grid far too small for the packet must raise the warning.
    MassShellGrid tiny(1.0, 0.5, 8);
    MomentumState clipped(AnalyticGaussian{{0, 0, 0}, {0.8, 0.8, 0.8}, {0, 0, 0}}, tiny);
    CHECK(clipped.diagnostics().truncation_warning);
}

TEST_CASE("zero state on the grid is rejected") {
    MassShellGrid g(1.0, 2.0, 8);
    std::vector<Complex> vals(g.size(), Complex{0.0, 0.0});
    CHECK_THROWS_AS(MomentumState(GridSamples{vals}, g), std::invalid_argument);
}
