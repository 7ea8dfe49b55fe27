// Copyright 2026 The pobs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pobs/algebra.hpp"
#include "pobs/bases.hpp"
#include "pobs/detail/eigensolve.hpp"

namespace pobs {

// ---------------------------------------------------------------------------
// Trace and inner product

/// Sum of the diagonal components. Basis independent.
inline Complex trace(const PseudoObservable &z) {
    return z.components().trace();
}

/// <X, Y> = tr(X^dagger Y); anti-linear in X.
inline Complex inner(const PseudoObservable &x, const PseudoObservable &y) {
    detail::require_same_dim(x, y, "inner");
    // tr(X^dagger Y) = sum_{jk} conj(x_jk) y_jk
    return x.components().conjugate().cwiseProduct(y.components()).sum();
}

inline double norm(const PseudoObservable &x) {
    return std::sqrt(std::max(0.0, x.components().squaredNorm()));
}

// ---------------------------------------------------------------------------
// Spectral decomposition

struct SpectralValue {
    double value;
    std::size_t multiplicity;
};

/// O = sum_j o_j I_j over an orthonormal eigenbasis.
struct SpectralDecomposition {
    ProjectorBasis basis;
    std::vector<double> coefficients;        // o_j, descending
    std::vector<SpectralValue> distinct;     // grouped within the degeneracy band
    std::vector<std::size_t> group_of;       // group_of[j] indexes `distinct`

    [[nodiscard]] std::size_t dim() const noexcept {
        return coefficients.size();
    }

    [[nodiscard]] PseudoObservable reassemble() const {
        const CMatrix &v = basis.vectors();
        Eigen::VectorXcd o(static_cast<Eigen::Index>(coefficients.size()));
        for (std::size_t j = 0; j < coefficients.size(); ++j) {
            o[static_cast<Eigen::Index>(j)] = coefficients[j];
        }
        return PseudoObservable(v * o.asDiagonal() * v.adjoint());
    }

    /// Index into `distinct` of the value matching `o` within `band`.
    [[nodiscard]] std::optional<std::size_t> find(double o, double band) const {
        for (std::size_t g = 0; g < distinct.size(); ++g) {
            if (std::abs(distinct[g].value - o) <= band) {
                return g;
            }
        }
        return std::nullopt;
    }

    double band = 0.0;  // grouping band used
};

inline SpectralDecomposition decompose(const Observable &o, const Tolerances &tol = {}) {
    if (!is_hermitian(o.value(), tol)) {
        throw Error(ErrorKind::NotHermitian, "decompose: input not Hermitian");
    }
    const detail::EigenPairs ep = detail::hermitian_eigen(o.components());
    const double band = detail::degeneracy_band(ep.values, tol.deg);
    std::vector<double> coeffs(ep.values.data(), ep.values.data() + ep.values.size());
    std::vector<SpectralValue> distinct;
    std::vector<std::size_t> group_of(coeffs.size());
    for (const auto &g : detail::cluster_sorted(ep.values, band)) {
        double mean = 0.0;
        for (Eigen::Index j : g) {
            mean += coeffs[static_cast<std::size_t>(j)];
            group_of[static_cast<std::size_t>(j)] = distinct.size();
        }
        distinct.push_back({mean / static_cast<double>(g.size()), g.size()});
    }
    SpectralDecomposition out{ProjectorBasis(ep.vectors, tol), std::move(coeffs), std::move(distinct),
                              std::move(group_of)};
    out.band = band;
    return out;
}

/// The dyads Gamma_{jk} of an eigenbasis with o_j = o' and o_k = o''; they
/// are right eigenvectors for o' and left eigenvectors for o''.
struct BilateralEigenspace {
    double right_value;
    double left_value;
    DyadBasis basis;
    std::vector<std::pair<std::size_t, std::size_t>> dyad_indices;

    [[nodiscard]] std::size_t dimension() const noexcept {
        return dyad_indices.size();
    }
};

inline BilateralEigenspace bilateral_eigenspace(const Observable &o, double right_value, double left_value,
                                                const Tolerances &tol = {}) {
    const SpectralDecomposition sd = decompose(o, tol);
    const auto g1 = sd.find(right_value, sd.band);
    const auto g2 = sd.find(left_value, sd.band);
    if (!g1 || !g2) {
        throw Error(ErrorKind::NotInSpectrum, "bilateral_eigenspace: (" + std::to_string(right_value) + ", " +
                                                  std::to_string(left_value) + ") not in spectrum");
    }
    BilateralEigenspace out{sd.distinct[*g1].value, sd.distinct[*g2].value, DyadBasis(sd.basis), {}};
    for (std::size_t j = 0; j < sd.dim(); ++j) {
        if (sd.group_of[j] != *g1) {
            continue;
        }
        for (std::size_t k = 0; k < sd.dim(); ++k) {
            if (sd.group_of[k] == *g2) {
                out.dyad_indices.emplace_back(j, k);
            }
        }
    }
    return out;
}

namespace detail {

inline std::optional<double> eigen_check(const Observable &o, const PseudoObservable &phi, bool right,
                                         const Tolerances &tol) {
    detail::require_same_dim(o.value(), phi, "eigenvector check");
    const double phi_norm = norm(phi);
    if (phi_norm <= std::numeric_limits<double>::min()) {
        throw Error(ErrorKind::ZeroInput, "eigenvector check on the null pseudo-observable");
    }
    const SpectralDecomposition sd = decompose(o, tol);
    const CMatrix applied = right ? CMatrix(o.components() * phi.components()) : CMatrix(phi.components() * o.components());
    for (const SpectralValue &sv : sd.distinct) {
        const double residual = (applied - sv.value * phi.components()).norm();
        if (residual <= Tolerances::scaled(tol.eig, detail::max_abs(o.components())) * phi_norm) {
            return sv.value;
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// The eigenvalue w with O Phi = w Phi, if any.
inline std::optional<double> check_right_eigenvector(const Observable &o, const PseudoObservable &phi,
                                                     const Tolerances &tol = {}) {
    return detail::eigen_check(o, phi, true, tol);
}

/// The eigenvalue w with Phi O = w Phi, if any.
inline std::optional<double> check_left_eigenvector(const Observable &o, const PseudoObservable &phi,
                                                    const Tolerances &tol = {}) {
    return detail::eigen_check(o, phi, false, tol);
}

/// phi(O) = sum_j phi(o_j) I_j. `f` is only ever evaluated on the spectrum.
inline PseudoObservable apply_function(const Observable &o, const std::function<Complex(double)> &f,
                                       const Tolerances &tol = {}) {
    const SpectralDecomposition sd = decompose(o, tol);
    const CMatrix &v = sd.basis.vectors();
    Eigen::VectorXcd fo(static_cast<Eigen::Index>(sd.dim()));
    for (std::size_t j = 0; j < sd.dim(); ++j) {
        fo[static_cast<Eigen::Index>(j)] = f(sd.distinct[sd.group_of[j]].value);
    }
    return PseudoObservable(v * fo.asDiagonal() * v.adjoint());
}

}  // namespace pobs
