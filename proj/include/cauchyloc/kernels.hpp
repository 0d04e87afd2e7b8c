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
 * Causal kernel families: the scalar profiles g, the localization kernels
 * of the causal-current and stress-energy observables (in the L^2(R^3)
 * convention where the diagonal is 1), positive-definiteness certification
 * on Gram samples, and the kappa second-moment correction.
 *
 * Convention note: exactly one function (l2_conversion) owns the
 * sqrt(p0 q0) factor between the invariant-measure and L^2(R^3, d^3p)
 * representations. Nothing else multiplies it.
 */

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <memory>
#include <stdexcept>
#include <variant>
#include <vector>

#include "linalg.hpp"
#include "quad.hpp"
#include "states.hpp"

namespace cauchyloc {

/// g_r(z) = (2m^2)^r / (m^2 + z)^r, r >= 3/2. Completely monotone in z.
struct PowerLaw {
    double r{1.5};
};

/// g(z) = ((1+c)m^2 / (c m^2 + z))^n, -1 < c <= 1, integer n > 1.
struct ShiftedPower {
    double c{1.0};
    int n{2};
};

class CausalKernelSpec;

/// Convex combination of kernel profiles; weights sum to 1.
struct Convex {
    std::vector<double> weights;
    std::vector<CausalKernelSpec> parts;
};

/// Finite-rank kernel sum_j conj(u_j(p)) u_j(q), pointwise-normalized so
/// the diagonal is 1. Components are closed-form (polynomial x Gaussian)
/// so derivative checks have symbolic oracles.
struct FiniteRank {
    std::vector<std::function<Complex(const Vec3 &)>> components;
};

class CausalKernelSpec {
  public:
    using Form = std::variant<PowerLaw, ShiftedPower, Convex, FiniteRank>;

    CausalKernelSpec(Form form, double mass) : form_(std::move(form)), mass_(mass) {
        if (!(mass > 0.0)) {
            throw std::invalid_argument("CausalKernelSpec: mass must be positive");
        }
        if (const auto *pl = std::get_if<PowerLaw>(&form_)) {
            if (!(pl->r >= 1.5)) {
                throw std::invalid_argument("CausalKernelSpec: power-law exponent must be >= 3/2");
            }
        } else if (const auto *sp = std::get_if<ShiftedPower>(&form_)) {
            if (!(sp->c > -1.0) || !(sp->c <= 1.0) || sp->n <= 1) {
                throw std::invalid_argument("CausalKernelSpec: shifted-power parameters out of range");
            }
        } else if (const auto *cv = std::get_if<Convex>(&form_)) {
            if (cv->weights.size() != cv->parts.size() || cv->parts.empty()) {
                throw std::invalid_argument("CausalKernelSpec: convex weight/part mismatch");
            }
            double s = 0.0;
            for (double w : cv->weights) {
                if (w < 0.0) {
                    throw std::invalid_argument("CausalKernelSpec: negative convex weight");
                }
                s += w;
            }
            if (std::abs(s - 1.0) > 1e-12) {
                throw std::invalid_argument("CausalKernelSpec: convex weights must sum to 1");
            }
            for (const auto &p : cv->parts) {
                if (p.is_finite_rank()) {
                    throw std::invalid_argument("CausalKernelSpec: convex parts must be scalar profiles");
                }
                if (p.mass() != mass) {
                    throw std::invalid_argument("CausalKernelSpec: convex part mass mismatch");
                }
            }
        } else if (const auto *fr = std::get_if<FiniteRank>(&form_)) {
            if (fr->components.empty()) {
                throw std::invalid_argument("CausalKernelSpec: finite-rank kernel needs components");
            }
        }
    }

    const Form &form() const { return form_; }
    double mass() const { return mass_; }
    bool is_finite_rank() const { return std::holds_alternative<FiniteRank>(form_); }

  private:
    Form form_;
    double mass_;
};

/// Scalar profile g(z) for z >= m^2, normalized to g(m^2) = 1. Hot path:
/// half-integer and small integer exponents avoid pow.
inline double g_eval(const CausalKernelSpec &spec, double z) {
    const double m2 = spec.mass() * spec.mass();
    if (z < m2 * (1.0 - 1e-12)) {
        throw std::domain_error("g_eval: argument below m^2");
    }
    struct Visitor {
        double m2;
        double z;
        double operator()(const PowerLaw &pl) const {
            const double t = 2.0 * m2 / (m2 + z);
            if (pl.r == 1.5) {
                return t * std::sqrt(t);
            }
            if (pl.r == 2.0) {
                return t * t;
            }
            if (pl.r == 3.0) {
                return t * t * t;
            }
            return std::pow(t, pl.r);
        }
        double operator()(const ShiftedPower &sp) const {
            const double t = (1.0 + sp.c) * m2 / (sp.c * m2 + z);
            if (sp.n == 2) {
                return t * t;
            }
            if (sp.n == 3) {
                return t * t * t;
            }
            return std::pow(t, sp.n);
        }
        double operator()(const Convex &cv) const {
            double s = 0.0;
            for (std::size_t i = 0; i < cv.parts.size(); ++i) {
                s += cv.weights[i] * g_eval(cv.parts[i], z);
            }
            return s;
        }
        double operator()(const FiniteRank &) const {
            throw std::domain_error("g_eval: finite-rank kernels have no scalar profile");
        }
    };
    return std::visit(Visitor{m2, z}, spec.form());
}

namespace detail {

inline void require_on_shell(const FourVector &k, double m, const char *where) {
    const double r = mdot(k, k) + m * m;
    if (std::abs(r) > 1e-10 * (1.0 + m * m) || k.x0 <= 0.0) {
        throw std::invalid_argument(std::string(where) + ": argument off the mass shell");
    }
}

} // namespace detail

/// The one place owning the measure conversion: covariant-representation
/// kernels divide by this to land in L^2(R^3, d^3p) where diagonals are 1.
inline double l2_conversion(double e_p, double e_q) { return std::sqrt(e_p * e_q); }

/// Pointwise normalization factor of a finite-rank kernel.
inline double finite_rank_norm(const FiniteRank &fr, const Vec3 &p) {
    double s = 0.0;
    for (const auto &u : fr.components) {
        s += std::norm(u(p));
    }
    if (!(s > 0.0)) {
        throw std::domain_error("finite-rank kernel: vanishing diagonal at a node");
    }
    return std::sqrt(s);
}

/// K(p, q) = sum_j conj(u_j(p)) u_j(q) / (|u(p)| |u(q)|); diagonal = 1.
inline Complex finite_rank_kernel(const FiniteRank &fr, const Vec3 &p, const Vec3 &q) {
    Complex s{0.0, 0.0};
    for (const auto &u : fr.components) {
        s += std::conj(u(p)) * u(q);
    }
    return s / (finite_rank_norm(fr, p) * finite_rank_norm(fr, q));
}

/// Localization kernel of the causal-current observable in the L^2(R^3)
/// convention: (k0 + p0) g(-k.p) / (2 sqrt(k0 p0)). Symmetric, diagonal 1.
inline double kernel_T(const CausalKernelSpec &spec, const FourVector &k, const FourVector &p) {
    if (spec.is_finite_rank()) {
        throw std::invalid_argument("kernel_T: finite-rank specs use finite_rank_kernel");
    }
    const double m = spec.mass();
    detail::require_on_shell(k, m, "kernel_T");
    detail::require_on_shell(p, m, "kernel_T");
    return (k.x0 + p.x0) * g_eval(spec, -mdot(k, p)) / (2.0 * l2_conversion(k.x0, p.x0));
}

/// Localization kernel of the stress-energy observable in the L^2(R^3)
/// convention. n is the observable frame, n_sigma the surface frame;
/// E_n(p) = -n.p. Symmetric in (q, p), diagonal 1 in matching frames.
inline double kernel_M(const FourVector &n, const FourVector &n_sigma, const FourVector &q,
                       const FourVector &p) {
    require_unit_future_timelike(n, "kernel_M");
    require_unit_future_timelike(n_sigma, "kernel_M");
    const double en_p = -mdot(n, p);
    const double en_q = -mdot(n, q);
    const double es_p = -mdot(n_sigma, p);
    const double es_q = -mdot(n_sigma, q);
    const double m2 = -mdot(p, p);
    const double num =
        en_p * es_q + en_q * es_p - mdot(n, n_sigma) * (mdot(p, q) + m2);
    return num / (2.0 * l2_conversion(en_p, en_q) * l2_conversion(es_p, es_q));
}

/// Current coefficient j_g(k, p) = (k + p) g(-k.p) / 2 (componentwise).
inline FourVector current_j(const CausalKernelSpec &spec, const FourVector &k,
                            const FourVector &p) {
    const double m = spec.mass();
    detail::require_on_shell(k, m, "current_j");
    detail::require_on_shell(p, m, "current_j");
    const double g = g_eval(spec, -mdot(k, p));
    return {0.5 * (k.x0 + p.x0) * g, scale3(0.5 * g, add3(k.xs, p.xs))};
}

using MomentumKernel = std::function<Complex(const Vec3 &, const Vec3 &)>;

/// Kernel of kernel_T as a function of spatial momenta (on-shell lift).
inline MomentumKernel momentum_kernel_T(const CausalKernelSpec &spec) {
    if (spec.is_finite_rank()) {
        const auto &fr = std::get<FiniteRank>(spec.form());
        return [fr](const Vec3 &p, const Vec3 &q) { return finite_rank_kernel(fr, p, q); };
    }
    return [spec](const Vec3 &p, const Vec3 &q) {
        const double m = spec.mass();
        const FourVector kp{lift(p, m), p};
        const FourVector kq{lift(q, m), q};
        return Complex(kernel_T(spec, kp, kq), 0.0);
    };
}

/// Kernel of kernel_M as a function of spatial momenta.
inline MomentumKernel momentum_kernel_M(const FourVector &n, const FourVector &n_sigma,
                                        double mass) {
    return [n, n_sigma, mass](const Vec3 &p, const Vec3 &q) {
        const FourVector kp{lift(p, mass), p};
        const FourVector kq{lift(q, mass), q};
        return Complex(kernel_M(n, n_sigma, kp, kq), 0.0);
    };
}

struct GramCheckResult {
    double min_eig{0.0};
    double max_eig{0.0};
    bool pass{false};
};

/// Positive-semidefiniteness certification: assemble K(p_i, p_j) on the
/// sample, assert Hermiticity, and bound the smallest eigenvalue. Dense
/// Jacobi eigensolve; M <= 400.
inline GramCheckResult gram_psd_check(const MomentumKernel &kernel,
                                      const std::vector<Vec3> &sample, double tol) {
    const std::size_t M = sample.size();
    if (M == 0 || M > 400) {
        throw std::invalid_argument("gram_psd_check: sample size must be in [1, 400]");
    }
    std::vector<Complex> K(M * M);
    for (std::size_t i = 0; i < M; ++i) {
        for (std::size_t j = i; j < M; ++j) {
            const Complex kij = kernel(sample[i], sample[j]);
            const Complex kji = kernel(sample[j], sample[i]);
            if (std::abs(kij - std::conj(kji)) > 1e-12 * (1.0 + std::abs(kij))) {
                throw std::runtime_error("gram_psd_check: kernel not Hermitian on the sample");
            }
            K[i * M + j] = kij;
            K[j * M + i] = std::conj(kij);
        }
    }
    const std::vector<double> ev = hermitian_eigenvalues(K, M);
    GramCheckResult r;
    r.min_eig = ev.front();
    r.max_eig = ev.back();
    r.pass = r.min_eig >= -tol * std::max(1.0, r.max_eig);
    return r;
}

/// Integral criterion: estimate of the double integral
/// integral conj(f(p)) K(p, q) f(q) d^3p d^3q on a midpoint momentum grid.
/// Agrees in sign with the Gram criterion for positive-definite kernels.
inline double integral_positivity_check(const MomentumKernel &kernel,
                                        const std::function<Complex(const Vec3 &)> &f,
                                        double box_half, int nodes) {
    if (nodes < 4) {
        throw std::invalid_argument("integral_positivity_check: too few nodes");
    }
    const double pitch = 2.0 * box_half / nodes;
    std::vector<Vec3> pts;
    std::vector<Complex> fv;
    pts.reserve(static_cast<std::size_t>(nodes) * nodes * nodes);
    for (int i = 0; i < nodes; ++i) {
        for (int j = 0; j < nodes; ++j) {
            for (int k = 0; k < nodes; ++k) {
                const Vec3 p{-box_half + (i + 0.5) * pitch, -box_half + (j + 0.5) * pitch,
                             -box_half + (k + 0.5) * pitch};
                const Complex v = f(p);
                if (std::abs(v) < 1e-300) {
                    continue; // compact support: skip dead nodes
                }
                pts.push_back(p);
                fv.push_back(v);
            }
        }
    }
    const double dv = pitch * pitch * pitch;
    Complex acc{0.0, 0.0};
    for (std::size_t i = 0; i < pts.size(); ++i) {
        acc += std::conj(fv[i]) * fv[i] * kernel(pts[i], pts[i]);
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            acc += 2.0 * (std::conj(fv[i]) * fv[j] * kernel(pts[i], pts[j])).real();
        }
    }
    return acc.real() * dv * dv;
}

/// kappa(p)_a = d/dq_a d/dp_a K(q, p) at q = p, by 2nd-order central
/// differences. Nonnegative for localization kernels.
inline double kappa_eval(const MomentumKernel &kernel, const Vec3 &p, int axis,
                         double step = 0.0) {
    const double h = step > 0.0 ? step : 1e-4 * (1.0 + norm3(p));
    Vec3 pp = p, pm = p;
    pp[axis] += h;
    pm[axis] -= h;
    const Complex mixed =
        kernel(pp, pp) - kernel(pp, pm) - kernel(pm, pp) + kernel(pm, pm);
    return mixed.real() / (4.0 * h * h);
}

} // namespace cauchyloc
