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
 * One-particle Klein-Gordon states in momentum representation on a
 * truncated mass-shell grid: the invariant measure, Fourier synthesis of
 * the covariant and anomalous wavefunctions, the Poincare action, and
 * Newton-Wigner position tools on flat rest slices.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <variant>
#include <vector>

#include "surface.hpp"

namespace cauchyloc {

using Complex = std::complex<double>;

/// Mass-shell lift: p^0 = sqrt(|p|^2 + m^2).
inline double lift(const Vec3 &ps, double m) {
    if (!(m > 0.0)) {
        throw std::invalid_argument("lift: mass must be positive");
    }
    return std::sqrt(dot3(ps, ps) + m * m);
}

/// Uniform momentum grid on [-P, P]^3 with midpoint nodes discretizing the
/// invariant mass-shell measure d mu_m = d^3p / p^0: node weight is
/// pitch^3 / p^0(p).
class MassShellGrid {
  public:
    MassShellGrid(double mass, double half_extent, int points_per_axis)
        : mass_(mass), half_extent_(half_extent), n_(points_per_axis) {
        if (!(mass > 0.0) || !(half_extent > 0.0) || points_per_axis < 2) {
            throw std::invalid_argument("MassShellGrid: bad parameters");
        }
        pitch_ = 2.0 * half_extent_ / n_;
    }

    double mass() const { return mass_; }
    double half_extent() const { return half_extent_; }
    int points_per_axis() const { return n_; }
    double pitch() const { return pitch_; }
    std::size_t size() const {
        return static_cast<std::size_t>(n_) * n_ * n_;
    }

    double axis_coord(int i) const { return -half_extent_ + (i + 0.5) * pitch_; }

    Vec3 node(std::size_t idx) const {
        const int k = static_cast<int>(idx % n_);
        const int j = static_cast<int>((idx / n_) % n_);
        const int i = static_cast<int>(idx / (static_cast<std::size_t>(n_) * n_));
        return {axis_coord(i), axis_coord(j), axis_coord(k)};
    }

    double energy(std::size_t idx) const { return lift(node(idx), mass_); }

    double weight(std::size_t idx) const {
        return pitch_ * pitch_ * pitch_ / energy(idx);
    }

    /// Cell volume d^3p of one node (no 1/p^0 factor).
    double cell_volume() const { return pitch_ * pitch_ * pitch_; }

    FourVector onshell(std::size_t idx) const {
        const Vec3 p = node(idx);
        return {lift(p, mass_), p};
    }

    bool same_as(const MassShellGrid &o) const {
        return mass_ == o.mass_ && half_extent_ == o.half_extent_ && n_ == o.n_;
    }

  private:
    double mass_;
    double half_extent_;
    int n_;
    double pitch_;
};

/// Analytic Gaussian packet in the L^2(R^3, d^3p) representation:
/// phi(p) ~ exp(-sum (p_a - pbar_a)^2 / (4 s_a^2)) exp(-i p . xbar).
struct AnalyticGaussian {
    Vec3 center_p{0, 0, 0};
    Vec3 spread{1, 1, 1};
    Vec3 center_x{0, 0, 0};
};

/// Smooth compactly supported radial bump in the phi-representation:
/// 1 inside inner_radius, 0 outside outer_radius, C^inf transition.
struct CompactBump {
    Vec3 center_p{0, 0, 0};
    double inner_radius{0.5};
    double outer_radius{1.0};
};

/// Raw samples of psi(k) (covariant representation) on the grid.
struct GridSamples {
    std::vector<Complex> values;
};

namespace detail {

inline double bump_transition(double u) {
    // C^inf monotone 1 -> 0 on [0,1] via the standard exp(-1/u) partition.
    if (u <= 0.0) {
        return 1.0;
    }
    if (u >= 1.0) {
        return 0.0;
    }
    const double a = std::exp(-1.0 / (1.0 - u));
    const double b = std::exp(-1.0 / u);
    return a / (a + b);
}

inline double compact_bump_profile(const CompactBump &cb, const Vec3 &p) {
    const double r = norm3(sub3(p, cb.center_p));
    return bump_transition((r - cb.inner_radius) / (cb.outer_radius - cb.inner_radius));
}

} // namespace detail

/// Metadata attached to a state after construction or transformation.
struct StateDiagnostics {
    double truncation_loss{0.0}; ///< norm fraction estimated lost to the grid cutoff
    bool truncation_warning{false};
};

/// A one-particle state on a MassShellGrid. Analytic representations keep
/// their closed form (composed with an accumulated Poincare element) so
/// that boosts and derivatives are evaluated exactly; grid samples fall
/// back to trilinear interpolation.
class MomentumState {
  public:
    using Rep = std::variant<AnalyticGaussian, CompactBump, GridSamples>;

    MomentumState(Rep rep, const MassShellGrid &grid)
        : rep_(std::move(rep)), grid_(grid), transform_(PoincareElement::identity()) {
        resample();
    }

    MomentumState(Rep rep, const MassShellGrid &grid, const PoincareElement &h)
        : rep_(std::move(rep)), grid_(grid), transform_(h) {
        resample();
    }

    const MassShellGrid &grid() const { return grid_; }
    const std::vector<Complex> &values() const { return values_; }
    const StateDiagnostics &diagnostics() const { return diag_; }
    bool analytic() const { return !std::holds_alternative<GridSamples>(rep_); }
    const PoincareElement &transform() const { return transform_; }

    /// psi(k) at an arbitrary on-shell point (k given by its spatial part).
    /// Exact for analytic representations, trilinear for grid samples.
    Complex psi_at(const Vec3 &kvec) const {
        const double k0 = lift(kvec, grid_.mass());
        const FourVector k{k0, kvec};
        // (U_h psi)(k) = e^{-i k . y} psi(Lambda^{-1} k)
        const FourVector kb = transform_.inverse().apply_linear(k);
        const Complex phase = std::exp(Complex(0.0, -mdot(k, transform_.y)));
        return scale_ * phase * base_psi(kb.xs);
    }

    /// phi(p) = psi(p) / sqrt(p^0): the L^2(R^3, d^3p) representation.
    Complex phi_at(const Vec3 &p) const { return psi_at(p) / std::sqrt(lift(p, grid_.mass())); }

    double norm_squared() const {
        double s = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i) {
            s += std::norm(values_[i]) * grid_.weight(i);
        }
        return s;
    }

    /// A copy of this state resampled on another grid (analytic reps only).
    MomentumState on_grid(const MassShellGrid &g) const {
        if (!analytic()) {
            throw std::invalid_argument("MomentumState::on_grid: requires an analytic state");
        }
        return MomentumState(rep_, g, transform_);
    }

  private:
    friend MomentumState poincare_act(const PoincareElement &, const MomentumState &);

    Complex base_psi(const Vec3 &kvec) const {
        const double k0 = lift(kvec, grid_.mass());
        if (const auto *g = std::get_if<AnalyticGaussian>(&rep_)) {
            double expo = 0.0;
            for (int a = 0; a < 3; ++a) {
                const double d = kvec[a] - g->center_p[a];
                expo -= d * d / (4.0 * g->spread[a] * g->spread[a]);
            }
            const Complex phase = std::exp(Complex(0.0, -dot3(kvec, g->center_x)));
            return std::sqrt(k0) * std::exp(expo) * phase;
        }
        if (const auto *cb = std::get_if<CompactBump>(&rep_)) {
            return std::sqrt(k0) * detail::compact_bump_profile(*cb, kvec);
        }
        // Grid samples: trilinear interpolation in the spatial momentum,
        // zero outside the grid (adds O(pitch^2) error).
        const auto &gs = std::get<GridSamples>(rep_);
        const int n = grid_.points_per_axis();
        const double pitch = grid_.pitch();
        double f[3];
        int i0[3];
        for (int a = 0; a < 3; ++a) {
            const double s = (kvec[a] + grid_.half_extent()) / pitch - 0.5;
            i0[a] = static_cast<int>(std::floor(s));
            f[a] = s - i0[a];
        }
        Complex acc{0.0, 0.0};
        for (int da = 0; da < 2; ++da) {
            for (int db = 0; db < 2; ++db) {
                for (int dc = 0; dc < 2; ++dc) {
                    const int ia = i0[0] + da, ib = i0[1] + db, ic = i0[2] + dc;
                    if (ia < 0 || ib < 0 || ic < 0 || ia >= n || ib >= n || ic >= n) {
                        continue;
                    }
                    const double w = (da ? f[0] : 1 - f[0]) * (db ? f[1] : 1 - f[1]) *
                                     (dc ? f[2] : 1 - f[2]);
                    const std::size_t idx =
                        (static_cast<std::size_t>(ia) * n + ib) * n + ic;
                    acc += w * gs.values[idx];
                }
            }
        }
        return acc;
    }

    void resample() {
        const std::size_t sz = grid_.size();
        values_.resize(sz);
        scale_ = 1.0;
        if (auto *gs = std::get_if<GridSamples>(&rep_)) {
            if (gs->values.size() != sz) {
                throw std::invalid_argument("MomentumState: grid sample size mismatch");
            }
            if (!transform_.is_pure_translation()) {
                // Interpolated resampling path.
                for (std::size_t i = 0; i < sz; ++i) {
                    values_[i] = psi_at(grid_.node(i));
                }
            } else {
                for (std::size_t i = 0; i < sz; ++i) {
                    const FourVector k = grid_.onshell(i);
                    values_[i] = gs->values[i] * std::exp(Complex(0.0, -mdot(k, transform_.y)));
                }
            }
        } else {
            for (std::size_t i = 0; i < sz; ++i) {
                values_[i] = psi_at(grid_.node(i));
            }
        }
        double n2 = 0.0;
        for (std::size_t i = 0; i < sz; ++i) {
            n2 += std::norm(values_[i]) * grid_.weight(i);
        }
        if (!(n2 > 0.0)) {
            throw std::invalid_argument("MomentumState: zero norm on the grid");
        }
        const double inv = 1.0 / std::sqrt(n2);
        for (auto &v : values_) {
            v *= inv;
        }
        scale_ *= inv;
        if (auto *gs = std::get_if<GridSamples>(&rep_)) {
            // Keep the stored samples consistent with the normalized state so
            // later resamplings do not re-apply the transform.
            gs->values = values_;
            transform_ = PoincareElement::identity();
            scale_ = 1.0;
        }
        estimate_truncation();
    }

    void estimate_truncation() {
        // Boundary-shell mass as a cheap proxy for the cutoff loss.
        const int n = grid_.points_per_axis();
        double edge = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i) {
            const int c = static_cast<int>(i % n);
            const int b = static_cast<int>((i / n) % n);
            const int a = static_cast<int>(i / (static_cast<std::size_t>(n) * n));
            if (a == 0 || b == 0 || c == 0 || a == n - 1 || b == n - 1 || c == n - 1) {
                edge += std::norm(values_[i]) * grid_.weight(i);
            }
        }
        diag_.truncation_loss = edge;
        diag_.truncation_warning = edge > 0.01;
    }

    Rep rep_;
    MassShellGrid grid_;
    PoincareElement transform_;
    std::vector<Complex> values_;
    double scale_{1.0};
    StateDiagnostics diag_;
};

/// Hermitian inner product with the discretized invariant measure.
inline Complex inner(const MomentumState &a, const MomentumState &b) {
    if (!a.grid().same_as(b.grid())) {
        throw std::invalid_argument("inner: grid mismatch");
    }
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < a.values().size(); ++i) {
        s += std::conj(a.values()[i]) * b.values()[i] * a.grid().weight(i);
    }
    return s;
}

/// (U_h psi)(k) = e^{-i k . y} psi(Lambda_h^{-1} k).
inline MomentumState poincare_act(const PoincareElement &h, const MomentumState &psi) {
    if (psi.analytic()) {
        return MomentumState(psi.rep_, psi.grid_, h.compose(psi.transform_));
    }
    return MomentumState(psi.rep_, psi.grid_, h);
}

/// Covariant wavefunction phi_psi(x) = (2 pi)^{-3/2} sum psi(p) e^{i p . x} w(p).
inline Complex covariant_wave(const MomentumState &psi, const FourVector &x) {
    constexpr double c = 0.0634936359342409697; // (2 pi)^{-3/2}
    Complex s{0.0, 0.0};
    const auto &g = psi.grid();
    for (std::size_t i = 0; i < psi.values().size(); ++i) {
        const FourVector p = g.onshell(i);
        s += psi.values()[i] * std::exp(Complex(0.0, mdot(p, x))) * g.weight(i);
    }
    return c * s;
}

struct AnomalousWave {
    Complex value;
    std::array<Complex, 4> grad; ///< partial_mu Phi in chart components
};

/// Anomalous wavefunction Phi^psi_n(x): the covariant synthesis with the
/// extra 1/sqrt(E_n(p)) factor, E_n(p) = -mdot(n, p). The gradient is the
/// exact term-by-term derivative (insertion of i p_mu, lower index).
inline AnomalousWave anomalous_wave(const MomentumState &psi, const FourVector &n,
                                    const FourVector &x) {
    require_unit_future_timelike(n, "anomalous_wave");
    constexpr double c = 0.0634936359342409697;
    AnomalousWave out{};
    const auto &g = psi.grid();
    for (std::size_t i = 0; i < psi.values().size(); ++i) {
        const FourVector p = g.onshell(i);
        const double en = -mdot(n, p);
        const Complex term =
            psi.values()[i] * std::exp(Complex(0.0, mdot(p, x))) * (g.weight(i) / std::sqrt(en));
        out.value += term;
        const Complex ip = Complex(0.0, 1.0) * term;
        out.grad[0] += ip * (-p.x0); // p_0 = -p^0
        out.grad[1] += ip * p.xs[0];
        out.grad[2] += ip * p.xs[1];
        out.grad[3] += ip * p.xs[2];
    }
    out.value *= c;
    for (auto &gmu : out.grad) {
        gmu *= c;
    }
    return out;
}

/// Newton-Wigner position density |(F phi)(x)|^2 on a flat untilted slice.
/// Its integral over R^3 is 1 for well-truncated packets.
inline double nw_position_density(const MomentumState &psi, const CauchySurfaceGraph &sigma,
                                  const Vec3 &x) {
    if (!sigma.is_untilted_flat()) {
        throw std::invalid_argument("nw_position_density: requires a flat untilted surface");
    }
    const double t0 = sigma.as_flat()->t0;
    constexpr double c = 0.0634936359342409697;
    Complex s{0.0, 0.0};
    const auto &g = psi.grid();
    const double dv = g.cell_volume();
    for (std::size_t i = 0; i < psi.values().size(); ++i) {
        const Vec3 q = g.node(i);
        const double q0 = g.energy(i);
        const Complex phi = psi.values()[i] / std::sqrt(q0);
        s += phi * std::exp(Complex(0.0, dot3(q, x) - q0 * t0)) * dv;
    }
    return std::norm(c * s);
}

/// Batch evaluator for the Newton-Wigner density on one fixed slice. The
/// time phase e^{-i q0 t0} depends only on the node, so it is folded into
/// the amplitudes once; the remaining e^{i q.x} factor is separable and
/// handled with per-axis phase tables, avoiding a complex exp per node.
class NwSynth {
  public:
    NwSynth(const MomentumState &psi, double t0)
        : n_(psi.grid().points_per_axis()), pitch_(psi.grid().pitch()) {
        const auto &g = psi.grid();
        origin_ = g.node(0)[0];
        amp_.resize(g.size());
        const double dv = g.cell_volume();
        constexpr double c = 0.0634936359342409697;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double q0 = g.energy(i);
            amp_[i] = psi.values()[i] / std::sqrt(q0) *
                      std::exp(Complex(0.0, -q0 * t0)) * (dv * c);
        }
    }

    double operator()(const Vec3 &x) const {
        for (int a = 0; a < 3; ++a) {
            auto &tab = tab_[a];
            tab.resize(n_);
            const Complex step = std::exp(Complex(0.0, pitch_ * x[a]));
            Complex cur = std::exp(Complex(0.0, origin_ * x[a]));
            for (int j = 0; j < n_; ++j) {
                tab[j] = cur;
                cur *= step;
            }
        }
        Complex s{0.0, 0.0};
        std::size_t i = 0;
        for (int j1 = 0; j1 < n_; ++j1) {
            const Complex f1 = tab_[0][j1];
            for (int j2 = 0; j2 < n_; ++j2) {
                const Complex f12 = f1 * tab_[1][j2];
                Complex inner{0.0, 0.0};
                for (int j3 = 0; j3 < n_; ++j3, ++i) {
                    inner += amp_[i] * tab_[2][j3];
                }
                s += f12 * inner;
            }
        }
        return std::norm(s);
    }

  private:
    int n_;
    double pitch_;
    double origin_;
    std::vector<Complex> amp_;
    mutable std::array<std::vector<Complex>, 3> tab_;
};

/// <phi | i d/dp_a phi> with 4th-order central differences; for analytic
/// states the stencil step is decoupled from the grid pitch. Returns the
/// real part; the imaginary residue is available through *imag_residue.
inline double nw_expectation(const MomentumState &psi, int axis,
                             double *imag_residue = nullptr) {
    const auto &g = psi.grid();
    const double h = psi.analytic() ? 1e-3 : g.pitch();
    Complex acc{0.0, 0.0};
    const double dv = g.cell_volume();
    for (std::size_t i = 0; i < psi.values().size(); ++i) {
        const Vec3 p = g.node(i);
        auto at = [&](double step) {
            Vec3 q = p;
            q[axis] += step;
            return psi.phi_at(q);
        };
        const Complex d =
            (8.0 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12.0 * h);
        const Complex phi = psi.values()[i] / std::sqrt(g.energy(i));
        acc += std::conj(phi) * Complex(0.0, 1.0) * d * dv;
    }
    if (imag_residue != nullptr) {
        *imag_residue = acc.imag();
    }
    return acc.real();
}

} // namespace cauchyloc
