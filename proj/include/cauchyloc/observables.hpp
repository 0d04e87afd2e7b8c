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

/**
 * @file
 * Localization observables on Cauchy surfaces: region probabilities for
 * the causal-kernel family, the stress-energy family, and the
 * Newton-Wigner projector; moments; the kappa-corrected second-moment
 * decomposition; Heisenberg reports; and the operator-vs-kernel
 * consistency check for the stress-energy family.
 *
 * Evaluation tiers for the causal-kernel observable (the only one with a
 * non-factorizable momentum pair coupling):
 *  1. flat surface + ball/box region: one pair pass against the region's
 *     closed-form Fourier transform, no spatial grid at all;
 *  2. untilted flat surface, any region: pair amplitudes collapsed onto
 *     the momentum difference lattice, then separable tensor evaluation
 *     of the density on the spatial grid;
 *  3. general surface: per-point pair engine under spatial quadrature.
 */

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "currents.hpp"
#include "kernels.hpp"
#include "quad.hpp"
#include "region.hpp"
#include "states.hpp"
#include "surface.hpp"

namespace cauchyloc {

struct CausalKernelT {
    CausalKernelSpec spec;
};

struct StressEnergyM {
    FourVector n{1.0, {0.0, 0.0, 0.0}};
};

struct NewtonWignerQ {};

using ObservableSpec = std::variant<CausalKernelT, StressEnergyM, NewtonWignerQ>;

struct ProbabilityEstimate {
    double value{0.0};
    double quad_error{0.0};
    double truncation_error{0.0};
    double total_error() const { return quad_error + truncation_error; }
};

namespace detail {

/// Closed-form region Fourier transform integral_Delta e^{i q.x} d^3x for
/// balls and boxes (and their complements inside the truncation box).
using RegionFt = std::function<Complex(const Vec3 &)>;

inline Complex ball_ft(const Vec3 &center, double R, const Vec3 &q) {
    const double qn = norm3(q);
    const double rho = R * qn;
    double radial;
    if (rho < 1e-4) {
        // 4 pi R^3 ( 1/3 - rho^2/30 + ... )
        radial = 4.0 * std::numbers::pi * R * R * R * (1.0 / 3.0 - rho * rho / 30.0);
    } else {
        radial = 4.0 * std::numbers::pi * (std::sin(rho) - rho * std::cos(rho)) / (qn * qn * qn);
    }
    return radial * std::exp(Complex(0.0, dot3(q, center)));
}

inline Complex box_ft(const Vec3 &lo, const Vec3 &hi, const Vec3 &q) {
    Complex out{1.0, 0.0};
    for (int a = 0; a < 3; ++a) {
        const double c = 0.5 * (lo[a] + hi[a]);
        const double h = 0.5 * (hi[a] - lo[a]);
        const double qa = q[a];
        const double axial = (std::abs(qa) < 1e-9) ? 2.0 * h * (1.0 - qa * qa * h * h / 6.0)
                                                   : 2.0 * std::sin(qa * h) / qa;
        out *= axial * std::exp(Complex(0.0, qa * c));
    }
    return out;
}

/// nullopt when the region has no closed-form transform (then the caller
/// falls back to a gridded tier).
inline std::optional<RegionFt> region_ft(const Region &delta, double box_half) {
    switch (delta.kind()) {
    case Region::Kind::Ball: {
        const Vec3 c = delta.ball_center();
        const double R = delta.ball_radius();
        return RegionFt([c, R](const Vec3 &q) { return ball_ft(c, R, q); });
    }
    case Region::Kind::Box: {
        const BoundingBox bb = *delta.bounding_box();
        return RegionFt([bb](const Vec3 &q) { return box_ft(bb.lo, bb.hi, q); });
    }
    case Region::Kind::All: {
        const Vec3 lo{-box_half, -box_half, -box_half};
        const Vec3 hi{box_half, box_half, box_half};
        return RegionFt([lo, hi](const Vec3 &q) { return box_ft(lo, hi, q); });
    }
    case Region::Kind::Complement: {
        auto inner = region_ft(delta.child(0), box_half);
        if (!inner) {
            return std::nullopt;
        }
        const Vec3 lo{-box_half, -box_half, -box_half};
        const Vec3 hi{box_half, box_half, box_half};
        RegionFt in = *inner;
        return RegionFt(
            [lo, hi, in](const Vec3 &q) { return box_ft(lo, hi, q) - in(q); });
    }
    default:
        return std::nullopt;
    }
}

/// Tier 1: flat-surface probability of the causal-kernel observable by a
/// single momentum pair pass. The chart integral of each plane-wave pair
/// is ft(q_eff) with q_eff = (p - k) - (p0 - k0) u and a t0 phase; the
/// surface contraction weight is (E_v(k) + E_v(p))/2 with E_v(p) = -v.p.
inline double flat_pair_probability(const CausalKernelSpec &spec, const MomentumState &psi,
                                    double t0, const Vec3 &u, const RegionFt &ft,
                                    double prune_tol = 1e-9) {
    const PairNodes nodes = build_pair_nodes(psi, prune_tol);
    const std::size_t n = nodes.p.size();
    std::vector<Complex> a(n);
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = nodes.amp[i] * std::exp(Complex(0.0, -nodes.p[i].x0 * t0));
        ev[i] = nodes.p[i].x0 - dot3(u, nodes.p[i].xs);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const FourVector &ki = nodes.p[i];
        for (std::size_t j = i; j < n; ++j) {
            const FourVector &pj = nodes.p[j];
            const double g = g_eval(spec, -mdot(ki, pj));
            const double w = 0.5 * (ev[i] + ev[j]) * g;
            const double dp0 = pj.x0 - ki.x0;
            const Vec3 qeff{pj.xs[0] - ki.xs[0] - dp0 * u[0], pj.xs[1] - ki.xs[1] - dp0 * u[1],
                            pj.xs[2] - ki.xs[2] - dp0 * u[2]};
            const Complex term = std::conj(a[i]) * a[j] * w * ft(qeff);
            acc += (i == j ? 1.0 : 2.0) * term.real();
        }
    }
    return acc * kInvTwoPiCubed;
}

/// Tier 2: density of the causal-kernel observable on an untilted flat
/// slice, collapsed onto the momentum difference lattice. One pair pass
/// builds B(d) = sum over index pairs with fixed node-index difference d;
/// the density on a tensor spatial grid is then a separable contraction.
class LatticeDensityT {
  public:
    LatticeDensityT(const CausalKernelSpec &spec, const MomentumState &psi, double t0,
                    double prune_tol = 1e-9) {
        const auto &g = psi.grid();
        nax_ = g.points_per_axis();
        pitch_ = g.pitch();
        const int D = 2 * nax_ - 1;
        b_.assign(static_cast<std::size_t>(D) * D * D, Complex{0.0, 0.0});

        // Kept nodes with their integer grid coordinates.
        std::vector<std::array<int, 3>> idx;
        std::vector<FourVector> p;
        std::vector<Complex> a;
        double amax = 0.0;
        for (const auto &v : psi.values()) {
            amax = std::max(amax, std::abs(v));
        }
        const double cut = prune_tol * amax;
        dropped_ = 0.0;
        for (std::size_t lin = 0; lin < psi.values().size(); ++lin) {
            if (std::abs(psi.values()[lin]) < cut) {
                dropped_ += std::norm(psi.values()[lin]) * g.weight(lin);
                continue;
            }
            const int k = static_cast<int>(lin % nax_);
            const int j = static_cast<int>((lin / nax_) % nax_);
            const int i = static_cast<int>(lin / (static_cast<std::size_t>(nax_) * nax_));
            idx.push_back({i, j, k});
            const FourVector node = g.onshell(lin);
            p.push_back(node);
            a.push_back(psi.values()[lin] * g.weight(lin) *
                        std::exp(Complex(0.0, -node.x0 * t0)));
        }
        const std::size_t n = p.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Complex ci = std::conj(a[i]);
            for (std::size_t j = 0; j < n; ++j) {
                const double w =
                    0.5 * (p[i].x0 + p[j].x0) * g_eval(spec, -mdot(p[i], p[j]));
                const int d1 = idx[j][0] - idx[i][0] + nax_ - 1;
                const int d2 = idx[j][1] - idx[i][1] + nax_ - 1;
                const int d3 = idx[j][2] - idx[i][2] + nax_ - 1;
                b_[(static_cast<std::size_t>(d1) * D + d2) * D + d3] += ci * a[j] * w;
            }
        }
    }

    double dropped_weight() const { return dropped_; }

    /// Density values on the tensor grid X1 x X2 x X3, row-major
    /// (x1 slowest). Cost O(D^2 (D + n3) + ...), independent of the pair
    /// count.
    std::vector<double> on_tensor_grid(const std::vector<double> &x1,
                                       const std::vector<double> &x2,
                                       const std::vector<double> &x3) const {
        const int D = 2 * nax_ - 1;
        auto phase_table = [&](const std::vector<double> &xs) {
            std::vector<Complex> t(static_cast<std::size_t>(D) * xs.size());
            for (int d = 0; d < D; ++d) {
                const double dq = (d - (nax_ - 1)) * pitch_;
                for (std::size_t m = 0; m < xs.size(); ++m) {
                    t[static_cast<std::size_t>(d) * xs.size() + m] =
                        std::exp(Complex(0.0, dq * xs[m]));
                }
            }
            return t;
        };
        const auto t1 = phase_table(x1);
        const auto t2 = phase_table(x2);
        const auto t3 = phase_table(x3);
        const std::size_t n1 = x1.size(), n2 = x2.size(), n3 = x3.size();

        // Contract axis 3: C[d1][d2][m3]
        std::vector<Complex> c(static_cast<std::size_t>(D) * D * n3, Complex{0.0, 0.0});
        for (int d1 = 0; d1 < D; ++d1) {
            for (int d2 = 0; d2 < D; ++d2) {
                const Complex *row = b_.data() + (static_cast<std::size_t>(d1) * D + d2) * D;
                Complex *out = c.data() + (static_cast<std::size_t>(d1) * D + d2) * n3;
                for (int d3 = 0; d3 < D; ++d3) {
                    const Complex bv = row[d3];
                    if (bv == Complex{0.0, 0.0}) {
                        continue;
                    }
                    const Complex *ph = t3.data() + static_cast<std::size_t>(d3) * n3;
                    for (std::size_t m = 0; m < n3; ++m) {
                        out[m] += bv * ph[m];
                    }
                }
            }
        }
        // Contract axis 2: E[d1][m2][m3]
        std::vector<Complex> e(static_cast<std::size_t>(D) * n2 * n3, Complex{0.0, 0.0});
        for (int d1 = 0; d1 < D; ++d1) {
            for (int d2 = 0; d2 < D; ++d2) {
                const Complex *in = c.data() + (static_cast<std::size_t>(d1) * D + d2) * n3;
                const Complex *ph = t2.data() + static_cast<std::size_t>(d2) * n2;
                for (std::size_t m2 = 0; m2 < n2; ++m2) {
                    Complex *out =
                        e.data() + (static_cast<std::size_t>(d1) * n2 + m2) * n3;
                    const Complex f = ph[m2];
                    for (std::size_t m3 = 0; m3 < n3; ++m3) {
                        out[m3] += f * in[m3];
                    }
                }
            }
        }
        // Contract axis 1 and take the real part.
        std::vector<double> rho(n1 * n2 * n3, 0.0);
        for (int d1 = 0; d1 < D; ++d1) {
            const Complex *ph = t1.data() + static_cast<std::size_t>(d1) * n1;
            for (std::size_t m1 = 0; m1 < n1; ++m1) {
                const Complex f = ph[m1];
                const Complex *in = e.data() + static_cast<std::size_t>(d1) * n2 * n3;
                double *out = rho.data() + m1 * n2 * n3;
                for (std::size_t m = 0; m < n2 * n3; ++m) {
                    out[m] += (f * in[m]).real();
                }
            }
        }
        for (auto &v : rho) {
            v *= kInvTwoPiCubed;
        }
        return rho;
    }

    /// Midpoint integral of weight(x) . density over the region at the
    /// given resolution.
    double integrate(const Region &delta, const BoundingBox &box, int nodes,
                     const std::function<double(const Vec3 &)> &weight) const {
        std::vector<double> x1(nodes), x2(nodes), x3(nodes);
        const double h1 = (box.hi[0] - box.lo[0]) / nodes;
        const double h2 = (box.hi[1] - box.lo[1]) / nodes;
        const double h3 = (box.hi[2] - box.lo[2]) / nodes;
        for (int i = 0; i < nodes; ++i) {
            x1[i] = box.lo[0] + (i + 0.5) * h1;
            x2[i] = box.lo[1] + (i + 0.5) * h2;
            x3[i] = box.lo[2] + (i + 0.5) * h3;
        }
        const std::vector<double> rho = on_tensor_grid(x1, x2, x3);
        const double cellv = h1 * h2 * h3;
        double acc = 0.0;
        std::size_t lin = 0;
        for (int i = 0; i < nodes; ++i) {
            for (int j = 0; j < nodes; ++j) {
                for (int k = 0; k < nodes; ++k, ++lin) {
                    const Vec3 x{x1[i], x2[j], x3[k]};
                    if (!delta.contains(x)) {
                        continue;
                    }
                    acc += (weight ? weight(x) : 1.0) * rho[lin] * cellv;
                }
            }
        }
        return acc;
    }

  private:
    int nax_;
    double pitch_;
    double dropped_;
    std::vector<Complex> b_;
};

inline double state_truncation(const MomentumState &psi, const QuadConfig &cfg) {
    if (psi.analytic()) {
        return tail_bound(psi, cfg);
    }
    return psi.diagnostics().truncation_loss;
}

inline BoundingBox region_box(const Region &delta, const QuadConfig &cfg) {
    if (auto bb = delta.bounding_box()) {
        return *bb;
    }
    const double L = cfg.spatial_box_half;
    return BoundingBox{{-L, -L, -L}, {L, L, L}};
}

} // namespace detail

/// Localization probability of the observable on (S, Delta).
inline ProbabilityEstimate probability(const ObservableSpec &obs, const MomentumState &psi,
                                       const CauchySurfaceGraph &S, const Region &delta,
                                       const QuadConfig &cfg) {
    cfg.validate();
    ProbabilityEstimate out;
    out.truncation_error = detail::state_truncation(psi, cfg);

    if (std::holds_alternative<NewtonWignerQ>(obs)) {
        if (!S.is_untilted_flat()) {
            throw std::invalid_argument(
                "probability: the Newton-Wigner projector is defined on untilted flat "
                "surfaces; boost the state instead of tilting the surface");
        }
        const NwSynth synth(psi, S.as_flat()->t0);
        auto density = [&synth](const Vec3 &x) { return synth(x); };
        const QuadResult q = integrate_region(std::function<double(const Vec3 &)>(density),
                                              delta, cfg);
        out.value = q.value;
        out.quad_error = q.error;
        return out;
    }

    if (const auto *mobs = std::get_if<StressEnergyM>(&obs)) {
        const FourVector n = mobs->n;
        auto density = [&psi, &S, n](const Vec3 &x) { return density_M(psi, n, S, x); };
        const QuadResult q = integrate_region(std::function<double(const Vec3 &)>(density),
                                              delta, cfg);
        out.value = q.value;
        out.quad_error = q.error;
        return out;
    }

    const auto &tobs = std::get<CausalKernelT>(obs);
    const CausalKernelSpec &spec = tobs.spec;

    if (spec.is_finite_rank()) {
        if (!S.is_untilted_flat()) {
            throw std::invalid_argument(
                "probability: finite-rank kernels are supported on untilted flat surfaces");
        }
        // Kernel-consistent density sum_j |a_j(x)|^2 with
        // a_j(x) = (2pi)^{-3/2} sum_p u_j(p) phi(p) e^{ip.x} d^3p.
        const auto &fr = std::get<FiniteRank>(spec.form());
        const double t0 = S.as_flat()->t0;
        auto density = [&psi, &fr, t0](const Vec3 &x) {
            const auto &g = psi.grid();
            const double dv = g.cell_volume();
            double rho = 0.0;
            for (const auto &u : fr.components) {
                Complex a{0.0, 0.0};
                for (std::size_t i = 0; i < psi.values().size(); ++i) {
                    const Vec3 pv = g.node(i);
                    const double p0 = g.energy(i);
                    const Complex phi = psi.values()[i] / std::sqrt(p0);
                    a += (u(pv) / finite_rank_norm(fr, pv)) * phi *
                         std::exp(Complex(0.0, dot3(pv, x) - p0 * t0)) * dv;
                }
                rho += std::norm(a);
            }
            return rho * kInvTwoPiCubed;
        };
        const QuadResult q = integrate_region(std::function<double(const Vec3 &)>(density),
                                              delta, cfg);
        out.value = q.value;
        out.quad_error = q.error;
        return out;
    }

    if (S.is_flat()) {
        const double t0 = S.as_flat()->t0;
        const Vec3 u = S.as_flat()->u;
        if (auto ft = detail::region_ft(delta, cfg.spatial_box_half)) {
            out.value = detail::flat_pair_probability(spec, psi, t0, u, *ft);
            if (psi.analytic()) {
                // Momentum-resolution error: rerun on a 3/4-resolution grid.
                const auto &g = psi.grid();
                const int nc = std::max(8, (3 * g.points_per_axis()) / 4);
                const MassShellGrid coarse(g.mass(), g.half_extent(), nc);
                const double vc = detail::flat_pair_probability(spec, psi.on_grid(coarse),
                                                                t0, u, *ft);
                out.quad_error = std::abs(out.value - vc);
            } else {
                out.quad_error = cfg.target_tol;
            }
            return out;
        }
        if (dot3(u, u) == 0.0) {
            const detail::LatticeDensityT lattice(spec, psi, t0);
            const BoundingBox box = detail::region_box(delta, cfg);
            const int n = cfg.spatial_nodes_per_axis;
            const double fine = lattice.integrate(delta, box, 2 * n, nullptr);
            const double coarse = lattice.integrate(delta, box, n, nullptr);
            out.value = fine;
            out.quad_error = std::abs(fine - coarse);
            out.truncation_error += lattice.dropped_weight();
            return out;
        }
    }

    // Tier 3: per-point pair engine under spatial quadrature.
    // A mild prune keeps the pair matrix small; the dropped amplitude mass
    // lands in the truncation budget below.
    const CausalPairEngine engine(spec, psi, 1e-5);
    BatchDensity density = [&engine, &S](const std::vector<Vec3> &pts) {
        std::vector<double> vals(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            vals[i] = engine.density(S, pts[i]);
        }
        return vals;
    };
    const QuadResult q = integrate_region(density, delta, cfg);
    out.value = q.value;
    out.quad_error = q.error;
    out.truncation_error += engine.nodes().dropped_weight;
    return out;
}

/// Total mass on the surface: probability of the full (truncated) chart.
inline ProbabilityEstimate total_norm(const ObservableSpec &obs, const MomentumState &psi,
                                      const CauchySurfaceGraph &S, const QuadConfig &cfg) {
    return probability(obs, psi, S, Region::all(), cfg);
}

/// Moment integral x^alpha of the observable density on an untilted flat
/// slice. alpha is a spatial multi-index with |alpha| <= 4.
inline double moment(const ObservableSpec &obs, const MomentumState &psi,
                     const CauchySurfaceGraph &sigma, const std::array<int, 3> &alpha,
                     const QuadConfig &cfg, double *error_out = nullptr) {
    cfg.validate();
    if (!sigma.is_untilted_flat()) {
        throw std::invalid_argument("moment: requires an untilted flat surface");
    }
    if (alpha[0] < 0 || alpha[1] < 0 || alpha[2] < 0 ||
        alpha[0] + alpha[1] + alpha[2] > 4) {
        throw std::invalid_argument("moment: |alpha| must be at most 4");
    }
    if (!psi.analytic()) {
        throw std::invalid_argument("moment: requires an analytic state (tail control)");
    }
    auto weight = [alpha](const Vec3 &x) {
        double w = 1.0;
        for (int a = 0; a < 3; ++a) {
            for (int k = 0; k < alpha[a]; ++k) {
                w *= x[a];
            }
        }
        return w;
    };
    // Momentum truncation makes the synthesized density ring in x; the
    // x^alpha weight amplifies that by at most box_half^|alpha| inside the
    // integration box.
    double trunc_amp = psi.diagnostics().truncation_loss;
    for (int k = 0; k < alpha[0] + alpha[1] + alpha[2]; ++k) {
        trunc_amp *= cfg.spatial_box_half;
    }

    if (const auto *tobs = std::get_if<CausalKernelT>(&obs); tobs && !tobs->spec.is_finite_rank()) {
        const detail::LatticeDensityT lattice(tobs->spec, psi, sigma.as_flat()->t0);
        const double L = cfg.spatial_box_half;
        const BoundingBox box{{-L, -L, -L}, {L, L, L}};
        const int n = cfg.spatial_nodes_per_axis;
        const double fine = lattice.integrate(Region::all(), box, 2 * n, weight);
        const double coarse = lattice.integrate(Region::all(), box, n, weight);
        if (error_out != nullptr) {
            // Outer-shell mass stands in for the tail clipped by the box.
            const double Ls = 0.75 * L;
            const BoundingBox inner{{-Ls, -Ls, -Ls}, {Ls, Ls, Ls}};
            const double shrunk =
                lattice.integrate(Region::all(), inner, (3 * n) / 2, weight);
            *error_out = std::abs(fine - coarse) + std::abs(fine - shrunk) +
                         lattice.dropped_weight() + trunc_amp;
        }
        return fine;
    }

    std::function<double(const Vec3 &)> density;
    if (const auto *mobs = std::get_if<StressEnergyM>(&obs)) {
        const FourVector n = mobs->n;
        density = [&psi, &sigma, n, weight](const Vec3 &x) {
            return weight(x) * density_M(psi, n, sigma, x);
        };
    } else if (std::holds_alternative<NewtonWignerQ>(obs)) {
        density = [&psi, &sigma, weight](const Vec3 &x) {
            return weight(x) * nw_position_density(psi, sigma, x);
        };
    } else {
        const auto &fr = std::get<FiniteRank>(std::get<CausalKernelT>(obs).spec.form());
        const double t0 = sigma.as_flat()->t0;
        density = [&psi, &fr, t0, weight](const Vec3 &x) {
            const auto &g = psi.grid();
            const double dv = g.cell_volume();
            double rho = 0.0;
            for (const auto &u : fr.components) {
                Complex a{0.0, 0.0};
                for (std::size_t i = 0; i < psi.values().size(); ++i) {
                    const Vec3 pv = g.node(i);
                    const double p0 = g.energy(i);
                    a += (u(pv) / finite_rank_norm(fr, pv)) *
                         (psi.values()[i] / std::sqrt(p0)) *
                         std::exp(Complex(0.0, dot3(pv, x) - p0 * t0)) * dv;
                }
                rho += std::norm(a);
            }
            return weight(x) * rho * kInvTwoPiCubed;
        };
    }
    const QuadResult q = integrate_region(density, Region::all(), cfg);
    if (error_out != nullptr) {
        QuadConfig shrunk = cfg;
        shrunk.spatial_box_half = 0.75 * cfg.spatial_box_half;
        shrunk.spatial_nodes_per_axis = std::max(8, (3 * cfg.spatial_nodes_per_axis) / 4);
        shrunk.refinement_levels = 1;
        const QuadResult qs = integrate_region(density, Region::all(), shrunk);
        *error_out = q.error + std::abs(q.value - qs.value) + trunc_amp;
    }
    return q.value;
}

struct SecondMomentDecomposition {
    double total{0.0};
    double nw_part{0.0};
    double kappa_part{0.0};
    double quad_error{0.0};
};

namespace detail {

/// <(N^a)^2> = ||d phi / d p_a||^2, 4th-order stencil on the analytic phi.
inline double nw_second_moment(const MomentumState &psi, int axis) {
    const auto &g = psi.grid();
    const double h = psi.analytic() ? 1e-3 : g.pitch();
    const double dv = g.cell_volume();
    double acc = 0.0;
    for (std::size_t i = 0; i < psi.values().size(); ++i) {
        const Vec3 p = g.node(i);
        auto at = [&](double step) {
            Vec3 q = p;
            q[axis] += step;
            return psi.phi_at(q);
        };
        const Complex d =
            (8.0 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12.0 * h);
        acc += std::norm(d) * dv;
    }
    return acc;
}

inline MomentumKernel observable_kernel(const ObservableSpec &obs, double mass) {
    if (const auto *tobs = std::get_if<CausalKernelT>(&obs)) {
        return momentum_kernel_T(tobs->spec);
    }
    if (const auto *mobs = std::get_if<StressEnergyM>(&obs)) {
        const FourVector n_sigma{1.0, {0.0, 0.0, 0.0}};
        return momentum_kernel_M(mobs->n, n_sigma, mass);
    }
    return [](const Vec3 &, const Vec3 &) { return Complex(1.0, 0.0); }; // Q: flat kernel
}

} // namespace detail

/// Second moment split per the kappa identity:
/// integral (x^a)^2 dA = <(N^a)^2> + <K_a>.
inline SecondMomentDecomposition second_moment_decomposition(const ObservableSpec &obs,
                                                             const MomentumState &psi,
                                                             const CauchySurfaceGraph &sigma,
                                                             int axis, const QuadConfig &cfg) {
    if (std::holds_alternative<NewtonWignerQ>(obs)) {
        throw std::invalid_argument(
            "second_moment_decomposition: the projector case has no kappa part; "
            "use moment directly");
    }
    SecondMomentDecomposition out;
    std::array<int, 3> alpha{0, 0, 0};
    alpha[axis] = 2;
    out.total = moment(obs, psi, sigma, alpha, cfg, &out.quad_error);

    const MomentumKernel kernel = detail::observable_kernel(obs, psi.grid().mass());
    auto kappa_sum = [&](const MomentumState &state) {
        const auto &g = state.grid();
        const double dv = g.cell_volume();
        double kp = 0.0;
        for (std::size_t i = 0; i < state.values().size(); ++i) {
            const double w = std::norm(state.values()[i]) / g.energy(i) * dv; // |phi|^2 d^3p
            if (w < 1e-18) {
                continue;
            }
            kp += w * kappa_eval(kernel, g.node(i), axis);
        }
        return kp;
    };
    out.nw_part = detail::nw_second_moment(psi, axis);
    out.kappa_part = kappa_sum(psi);
    if (psi.analytic()) {
        // Analytic states admit resampling, so the momentum-grid pieces get
        // a refinement error estimate and the refined values are kept.
        const auto &g = psi.grid();
        const MassShellGrid fine(g.mass(), g.half_extent(), (3 * g.points_per_axis()) / 2);
        const MomentumState psi_f = psi.on_grid(fine);
        const double nw_f = detail::nw_second_moment(psi_f, axis);
        const double kp_f = kappa_sum(psi_f);
        out.quad_error += std::abs(nw_f - out.nw_part) + std::abs(kp_f - out.kappa_part);
        out.nw_part = nw_f;
        out.kappa_part = kp_f;
    }
    return out;
}

struct HeisenbergReport {
    double dx{0.0};
    double dp{0.0};
    double lhs{0.0};
    double modified_rhs{0.0};
    double standard_rhs{0.5};
    double kappa_expectation{0.0};
    double tolerance{0.0};
    bool modified_ok{false};
    bool standard_ok{false};
};

/// Uncertainty product report along one axis, with the kappa-corrected
/// lower bound (hbar = 1).
inline HeisenbergReport heisenberg_report(const ObservableSpec &obs, const MomentumState &psi,
                                          const CauchySurfaceGraph &sigma, int axis,
                                          const QuadConfig &cfg) {
    HeisenbergReport rep;
    std::array<int, 3> a1{0, 0, 0};
    a1[axis] = 1;
    double e1 = 0.0, e2 = 0.0;
    const double m1 = moment(obs, psi, sigma, a1, cfg, &e1);

    double total2, kappa_exp, e_k = 0.0;
    if (std::holds_alternative<NewtonWignerQ>(obs)) {
        std::array<int, 3> a2{0, 0, 0};
        a2[axis] = 2;
        total2 = moment(obs, psi, sigma, a2, cfg, &e2);
        kappa_exp = 0.0;
    } else {
        const SecondMomentDecomposition d = second_moment_decomposition(obs, psi, sigma, axis, cfg);
        total2 = d.total;
        e2 = d.quad_error;
        kappa_exp = d.kappa_part;
    }

    const auto &g = psi.grid();
    double p1 = 0.0, p2 = 0.0;
    for (std::size_t i = 0; i < psi.values().size(); ++i) {
        const double w = std::norm(psi.values()[i]) * g.weight(i);
        const double pa = g.node(i)[axis];
        p1 += w * pa;
        p2 += w * pa * pa;
    }
    rep.dp = std::sqrt(std::max(0.0, p2 - p1 * p1));
    rep.dx = std::sqrt(std::max(0.0, total2 - m1 * m1));
    rep.lhs = rep.dx * rep.dp;
    rep.kappa_expectation = kappa_exp;
    rep.modified_rhs = 0.5 * std::sqrt(1.0 + 4.0 * rep.dp * rep.dp * std::max(0.0, kappa_exp));
    rep.tolerance = e1 + e2 + e_k + 1e-6;
    rep.modified_ok = rep.lhs >= rep.modified_rhs - rep.tolerance;
    rep.standard_ok = rep.lhs >= rep.standard_rhs - rep.tolerance;
    return rep;
}

/// Independent evaluation of the stress-energy localization kernel from
/// the operator composition that deforms the Newton-Wigner projector:
/// every factor is a multiplicative momentum function, so the sandwiched
/// kernel is explicit. Must agree with kernel_M to near machine precision.
inline double mpovm_kernel_crosscheck(const FourVector &n, const FourVector &n_sigma,
                                      const std::vector<std::pair<FourVector, FourVector>> &pairs) {
    require_unit_future_timelike(n, "mpovm_kernel_crosscheck");
    require_unit_future_timelike(n_sigma, "mpovm_kernel_crosscheck");
    double worst = 0.0;
    for (const auto &[q, p] : pairs) {
        const double en_p = -mdot(n, p), en_q = -mdot(n, q);
        const double es_p = -mdot(n_sigma, p), es_q = -mdot(n_sigma, q);
        // A(p) = sqrt(H_{n_sigma}/H_n)(p)
        const double ap = std::sqrt(es_p / en_p);
        const double aq = std::sqrt(es_q / en_q);
        const double m2 = -mdot(p, p);
        // Symmetrized ratio sandwich + deformation term with eta^{mn} P_m P_n
        // and the mass term, each divided by H_{n_sigma} on both sides.
        const double composed = 0.5 * (ap / aq + aq / ap) -
                                0.5 * mdot(n, n_sigma) * (mdot(q, p) + m2) /
                                    (es_p * es_q) * ap * aq;
        const double direct = kernel_M(n, n_sigma, q, p);
        worst = std::max(worst, std::abs(composed - direct));
    }
    return worst;
}

} // namespace cauchyloc
