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
 * Minkowski vector algebra in a fixed global chart with signature
 * (-,+,+,+), causal classification of vectors, and orthochronous
 * Poincare transformations.
 */

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace cauchyloc {

using Vec3 = std::array<double, 3>;

inline double dot3(const Vec3 &a, const Vec3 &b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline Vec3 sub3(const Vec3 &a, const Vec3 &b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 add3(const Vec3 &a, const Vec3 &b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 scale3(double c, const Vec3 &a) { return {c * a[0], c * a[1], c * a[2]}; }
inline double norm3(const Vec3 &a) { return std::sqrt(dot3(a, a)); }
inline bool finite3(const Vec3 &a) {
    return std::isfinite(a[0]) && std::isfinite(a[1]) && std::isfinite(a[2]);
}

/// A point/vector of Minkowski space in the fixed global chart.
/// Components are natural units (c = hbar = 1).
struct FourVector {
    double x0{0.0};
    Vec3 xs{0.0, 0.0, 0.0};

    FourVector() = default;
    FourVector(double t, const Vec3 &s) : x0(t), xs(s) {
        if (!std::isfinite(x0) || !finite3(xs)) {
            throw std::invalid_argument("FourVector: non-finite component");
        }
    }
    FourVector(double t, double x, double y, double z) : FourVector(t, Vec3{x, y, z}) {}

    FourVector operator+(const FourVector &o) const { return {x0 + o.x0, add3(xs, o.xs)}; }
    FourVector operator-(const FourVector &o) const { return {x0 - o.x0, sub3(xs, o.xs)}; }
    FourVector operator*(double c) const { return {c * x0, scale3(c, xs)}; }
    FourVector operator-() const { return {-x0, scale3(-1.0, xs)}; }
};

/// Lorentzian inner product, signature (-1,+1,+1,+1).
inline double mdot(const FourVector &a, const FourVector &b) {
    return -a.x0 * b.x0 + dot3(a.xs, b.xs);
}

enum class CausalClass {
    SpacelikeOrZero,
    TimelikeFuture,
    TimelikePast,
    LightlikeFuture,
    LightlikePast,
};

/// Classify v by the sign of mdot(v,v) and the sign of v.x0. A vector is
/// treated as lightlike when |mdot(v,v)| <= tau_cls * |v|^2 (relative
/// tolerance); the zero vector is spacelike per definition.
inline CausalClass causal_class(const FourVector &v, double tau_cls = 1e-12) {
    const double n2 = mdot(v, v);
    const double scale = v.x0 * v.x0 + dot3(v.xs, v.xs);
    if (scale == 0.0) {
        return CausalClass::SpacelikeOrZero;
    }
    if (std::abs(n2) <= tau_cls * scale) {
        return v.x0 > 0.0 ? CausalClass::LightlikeFuture : CausalClass::LightlikePast;
    }
    if (n2 > 0.0) {
        return CausalClass::SpacelikeOrZero;
    }
    return v.x0 > 0.0 ? CausalClass::TimelikeFuture : CausalClass::TimelikePast;
}

/// q in J+(p) union J-(p); p = q is admitted (the closed causal cones).
inline bool causally_related(const FourVector &p, const FourVector &q) {
    const FourVector d = q - p;
    return mdot(d, d) <= 0.0;
}

/// A 4x4 Lorentz matrix acting on chart components. Rows index the output.
using LorentzMatrix = std::array<std::array<double, 4>, 4>;

inline LorentzMatrix lorentz_identity() {
    LorentzMatrix m{};
    for (int i = 0; i < 4; ++i) {
        m[i][i] = 1.0;
    }
    return m;
}

inline LorentzMatrix lorentz_mul(const LorentzMatrix &a, const LorentzMatrix &b) {
    LorentzMatrix r{};
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) {
                s += a[i][k] * b[k][j];
            }
            r[i][j] = s;
        }
    }
    return r;
}

/// An element (y, Lambda) of the orthochronous Poincare group acting as
/// x -> y + Lambda x on chart components.
struct PoincareElement {
    FourVector y{};
    LorentzMatrix lambda{lorentz_identity()};

    static PoincareElement identity() { return {}; }

    static PoincareElement translation(const FourVector &y) { return {y, lorentz_identity()}; }

    static PoincareElement boost_x(double rapidity) {
        PoincareElement h;
        const double ch = std::cosh(rapidity), sh = std::sinh(rapidity);
        h.lambda[0][0] = ch;
        h.lambda[0][1] = sh;
        h.lambda[1][0] = sh;
        h.lambda[1][1] = ch;
        return h;
    }

    static PoincareElement rotation_z(double angle) {
        PoincareElement h;
        const double c = std::cos(angle), s = std::sin(angle);
        h.lambda[1][1] = c;
        h.lambda[1][2] = -s;
        h.lambda[2][1] = s;
        h.lambda[2][2] = c;
        return h;
    }

    FourVector apply_linear(const FourVector &x) const {
        std::array<double, 4> in{x.x0, x.xs[0], x.xs[1], x.xs[2]};
        std::array<double, 4> out{};
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                out[i] += lambda[i][j] * in[j];
            }
        }
        return {out[0], Vec3{out[1], out[2], out[3]}};
    }

    FourVector apply(const FourVector &x) const { return y + apply_linear(x); }

    /// Composition law (y1, L1)(y2, L2) = (y1 + L1 y2, L1 L2).
    PoincareElement compose(const PoincareElement &o) const {
        return {y + apply_linear(o.y), lorentz_mul(lambda, o.lambda)};
    }

    PoincareElement inverse() const {
        // Lorentz inverse via eta L^T eta.
        LorentzMatrix inv{};
        auto eta = [](int i) { return i == 0 ? -1.0 : 1.0; };
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                inv[i][j] = eta(i) * lambda[j][i] * eta(j);
            }
        }
        PoincareElement h;
        h.lambda = inv;
        h.y = -h.apply_linear(y);
        return h;
    }

    bool is_pure_translation() const {
        const LorentzMatrix id = lorentz_identity();
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                if (std::abs(lambda[i][j] - id[i][j]) > 1e-15) {
                    return false;
                }
            }
        }
        return true;
    }
};

/// Unit future timelike check: mdot(n,n) = -1 within tol and n.x0 > 0.
inline bool is_unit_future_timelike(const FourVector &n, double tol = 1e-9) {
    return n.x0 > 0.0 && std::abs(mdot(n, n) + 1.0) <= tol;
}

inline void require_unit_future_timelike(const FourVector &n, const std::string &what) {
    if (!is_unit_future_timelike(n)) {
        throw std::invalid_argument(what + ": not a unit future-directed timelike vector");
    }
}

} // namespace cauchyloc
