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
 * Minimal dense symmetric eigensolver (cyclic Jacobi) plus the Hermitian
 * case through the real 2M x 2M embedding. Deliberately dependency-free:
 * matrices here are small Gram blocks (M <= ~400).
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace cauchyloc {

/// Eigenvalues of a real symmetric n x n matrix (row-major), ascending.
/// Cyclic Jacobi; converges quadratically, capped at max_sweeps.
inline std::vector<double> symmetric_eigenvalues(std::vector<double> a, std::size_t n,
                                                 int max_sweeps = 50) {
    if (a.size() != n * n) {
        throw std::invalid_argument("symmetric_eigenvalues: size mismatch");
    }
    auto at = [&](std::size_t i, std::size_t j) -> double & { return a[i * n + j]; };
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                off += at(i, j) * at(i, j);
            }
        }
        if (off < 1e-30 * (1.0 + off)) {
            break;
        }
        double diag = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            diag += at(i, i) * at(i, i);
        }
        if (off <= 1e-28 * (diag + 1.0)) {
            break;
        }
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) {
                    continue;
                }
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(k, p);
                    const double akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(p, k);
                    const double aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) {
        ev[i] = at(i, i);
    }
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Eigenvalues of a Hermitian n x n matrix, ascending. Uses the real
/// embedding [[A, -B], [B, A]] of A + iB, whose spectrum is that of the
/// Hermitian matrix with each eigenvalue doubled; duplicates are collapsed
/// by taking every other entry of the sorted list.
inline std::vector<double> hermitian_eigenvalues(const std::vector<std::complex<double>> &h,
                                                 std::size_t n) {
    if (h.size() != n * n) {
        throw std::invalid_argument("hermitian_eigenvalues: size mismatch");
    }
    const std::size_t m = 2 * n;
    std::vector<double> r(m * m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double re = h[i * n + j].real();
            const double im = h[i * n + j].imag();
            r[i * m + j] = re;
            r[(i + n) * m + (j + n)] = re;
            r[i * m + (j + n)] = -im;
            r[(i + n) * m + j] = im;
        }
    }
    std::vector<double> ev = symmetric_eigenvalues(std::move(r), m);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = 0.5 * (ev[2 * i] + ev[2 * i + 1]);
    }
    return out;
}

} // namespace cauchyloc
