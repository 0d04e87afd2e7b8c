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
 * Spacelike Cauchy surfaces represented as graphs x^0 = t_S(x) over the
 * spatial chart, restricted to two analytic families (tilted flat and
 * tilted flat plus Gaussian bump) so that the gradient and the spacelike
 * bound sup |grad t_S| < 1 - margin are available in closed form.
 */

#pragma once

#include <cmath>
#include <stdexcept>
#include <variant>

#include "minkowski.hpp"

namespace cauchyloc {

/// Pointwise surface data at a chart point: height, gradient, the
/// future-directed unit normal n_S, the non-normalized normal
/// v_S = (1, grad t_S), and the volume density sqrt(1 - |grad t_S|^2).
struct SurfacePoint {
    double t;
    Vec3 grad;
    FourVector n_S;
    FourVector v_S;
    double density;
};

class CauchySurfaceGraph {
  public:
    struct Flat {
        double t0{0.0};
        Vec3 u{0.0, 0.0, 0.0};
    };
    struct GaussianBump {
        double t0{0.0};
        Vec3 u{0.0, 0.0, 0.0};
        double amplitude{0.0};
        Vec3 center{0.0, 0.0, 0.0};
        double width{1.0};
    };

    static CauchySurfaceGraph flat(double t0, const Vec3 &u = {0, 0, 0},
                                   double margin = 0.05) {
        if (norm3(u) >= 1.0 - margin) {
            throw std::invalid_argument("CauchySurfaceGraph: |u| violates the spacelike margin");
        }
        return CauchySurfaceGraph(Flat{t0, u});
    }

    static CauchySurfaceGraph bump(double t0, const Vec3 &u, double amplitude,
                                   const Vec3 &center, double width, double margin = 0.05) {
        if (!(width > 0.0)) {
            throw std::invalid_argument("CauchySurfaceGraph: bump width must be positive");
        }
        // Closed-form bound: sup |grad of the bump part| = |A| e^{-1/2} / width.
        const double bound = norm3(u) + std::abs(amplitude) * std::exp(-0.5) / width;
        if (bound >= 1.0 - margin) {
            throw std::invalid_argument("CauchySurfaceGraph: bump violates the spacelike margin");
        }
        return CauchySurfaceGraph(GaussianBump{t0, u, amplitude, center, width});
    }

    double height(const Vec3 &x) const {
        if (const auto *f = std::get_if<Flat>(&family_)) {
            return f->t0 + dot3(f->u, x);
        }
        const auto &b = std::get<GaussianBump>(family_);
        const Vec3 d = sub3(x, b.center);
        return b.t0 + dot3(b.u, x) +
               b.amplitude * std::exp(-0.5 * dot3(d, d) / (b.width * b.width));
    }

    Vec3 gradient(const Vec3 &x) const {
        if (const auto *f = std::get_if<Flat>(&family_)) {
            return f->u;
        }
        const auto &b = std::get<GaussianBump>(family_);
        const Vec3 d = sub3(x, b.center);
        const double w2 = b.width * b.width;
        const double g = b.amplitude * std::exp(-0.5 * dot3(d, d) / w2) / w2;
        return add3(b.u, scale3(-g, d));
    }

    SurfacePoint eval(const Vec3 &x) const {
        if (!finite3(x)) {
            throw std::invalid_argument("CauchySurfaceGraph::eval: non-finite point");
        }
        SurfacePoint sp;
        sp.t = height(x);
        sp.grad = gradient(x);
        sp.density = std::sqrt(1.0 - dot3(sp.grad, sp.grad));
        sp.v_S = FourVector(1.0, sp.grad);
        sp.n_S = sp.v_S * (1.0 / sp.density);
        return sp;
    }

    FourVector point(const Vec3 &x) const { return {height(x), x}; }

    bool is_flat() const { return std::holds_alternative<Flat>(family_); }

    bool is_untilted_flat() const {
        const auto *f = std::get_if<Flat>(&family_);
        return f != nullptr && norm3(f->u) == 0.0;
    }

    const Flat *as_flat() const { return std::get_if<Flat>(&family_); }
    const GaussianBump *as_bump() const { return std::get_if<GaussianBump>(&family_); }

    bool same_as(const CauchySurfaceGraph &o) const {
        if (const auto *f = as_flat()) {
            const auto *g = o.as_flat();
            return g && f->t0 == g->t0 && f->u == g->u;
        }
        const auto *b = as_bump();
        const auto *c = o.as_bump();
        return b && c && b->t0 == c->t0 && b->u == c->u && b->amplitude == c->amplitude &&
               b->center == c->center && b->width == c->width;
    }

    /// sup over the chart of |t_S - t_other| estimated on a closed form:
    /// used by the coherence check to certify agreement regions.
    double height_gap_bound(const CauchySurfaceGraph &o, const Vec3 &center,
                            double radius) const;

  private:
    explicit CauchySurfaceGraph(Flat f) : family_(f) {}
    explicit CauchySurfaceGraph(GaussianBump b) : family_(b) {}

    std::variant<Flat, GaussianBump> family_;
};

inline double CauchySurfaceGraph::height_gap_bound(const CauchySurfaceGraph &o,
                                                   const Vec3 &center, double radius) const {
    // Sampled sup over the ball; the analytic families are slowly varying so a
    // moderate grid with a gradient-based slack is a certified bound.
    const int n = 17;
    double sup = 0.0;
    double gmax = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                const Vec3 x{center[0] + radius * (2.0 * i / (n - 1) - 1.0),
                             center[1] + radius * (2.0 * j / (n - 1) - 1.0),
                             center[2] + radius * (2.0 * k / (n - 1) - 1.0)};
                sup = std::max(sup, std::abs(height(x) - o.height(x)));
                gmax = std::max(gmax, norm3(gradient(x)) + norm3(o.gradient(x)));
            }
        }
    }
    const double pitch = 2.0 * radius / (n - 1);
    return sup + gmax * pitch;
}

/// Transport a flat surface by a Poincare element: the image of a spacelike
/// plane is again a spacelike plane, re-expressed as a graph in the chart.
inline CauchySurfaceGraph map_flat_surface(const PoincareElement &h,
                                           const CauchySurfaceGraph &S) {
    const auto *f = S.as_flat();
    if (f == nullptr) {
        throw std::invalid_argument("map_flat_surface: surface is not flat");
    }
    // Plane w . x = t0 with covector w = (1, -u). Image plane has covector
    // w' = w Lambda^{-1} and offset t0 + w . (Lambda^{-1} y).
    const PoincareElement hi = h.inverse();
    std::array<double, 4> wp{};
    const std::array<double, 4> w{1.0, -f->u[0], -f->u[1], -f->u[2]};
    for (int j = 0; j < 4; ++j) {
        for (int i = 0; i < 4; ++i) {
            wp[j] += w[i] * hi.lambda[i][j];
        }
    }
    const FourVector yi = hi.apply_linear(h.y);
    const double rhs = f->t0 + w[0] * yi.x0 + w[1] * yi.xs[0] + w[2] * yi.xs[1] + w[3] * yi.xs[2];
    if (!(wp[0] > 0.0)) {
        throw std::invalid_argument("map_flat_surface: image is not a future graph");
    }
    const Vec3 u_new{-wp[1] / wp[0], -wp[2] / wp[0], -wp[3] / wp[0]};
    return CauchySurfaceGraph::flat(rhs / wp[0], u_new);
}

} // namespace cauchyloc
