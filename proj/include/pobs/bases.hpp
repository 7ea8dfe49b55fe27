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

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pobs/algebra.hpp"
#include "pobs/detail/eigensolve.hpp"

namespace pobs {

/// An ordered family of d mutually exclusive elementary projectors summing
/// to the identity, each generated by one unit vector I_j = v_j v_j^dagger.
///
/// The vectors carry a phase choice the projectors alone do not; that choice
/// fixes the dyads of the associated `DyadBasis`.
class ProjectorBasis {
   public:
    /// Columns of `vectors` are v_0 ... v_{d-1}. Throws NotOrthonormal.
    explicit ProjectorBasis(CMatrix vectors, const Tolerances &tol = {}) : v_(std::move(vectors)) {
        if (v_.rows() < 1 || v_.rows() != v_.cols()) {
            throw Error(ErrorKind::DimensionMismatch, "projector basis needs d vectors of length d");
        }
        if (!v_.allFinite()) {
            throw Error(ErrorKind::NonFinite, "basis vector contains NaN or Inf");
        }
        const CMatrix gram = v_.adjoint() * v_;
        const double defect = detail::max_abs(gram - CMatrix::Identity(v_.cols(), v_.cols()));
        if (defect > tol.orth) {
            throw Error(ErrorKind::NotOrthonormal, "max |<v_j, v_k> - delta_jk| = " + std::to_string(defect));
        }
        const double closure = detail::max_abs(v_ * v_.adjoint() - CMatrix::Identity(v_.rows(), v_.rows()));
        if (closure > tol.orth) {
            throw Error(ErrorKind::NotOrthonormal, "closure |sum_j I_j - 1| = " + std::to_string(closure));
        }
    }

    static ProjectorBasis computational(std::size_t d) {
        const auto n = static_cast<Eigen::Index>(d);
        return ProjectorBasis(CMatrix::Identity(n, n));
    }

    [[nodiscard]] std::size_t dim() const noexcept {
        return static_cast<std::size_t>(v_.cols());
    }
    [[nodiscard]] const CMatrix &vectors() const noexcept {
        return v_;
    }
    [[nodiscard]] CVector vector(std::size_t j) const {
        check_index(j);
        return v_.col(static_cast<Eigen::Index>(j));
    }
    /// I_j
    [[nodiscard]] PseudoObservable projector(std::size_t j) const {
        check_index(j);
        const auto c = v_.col(static_cast<Eigen::Index>(j));
        return PseudoObservable(c * c.adjoint());
    }

    void check_index(std::size_t j) const {
        if (j >= dim()) {
            throw Error(ErrorKind::IndexOutOfRange,
                        "index " + std::to_string(j) + " out of range for dim " + std::to_string(dim()));
        }
    }

   private:
    CMatrix v_;
};

/// Validated constructor from a list of vectors.
inline ProjectorBasis make_basis(const std::vector<CVector> &vectors, const Tolerances &tol = {}) {
    if (vectors.empty()) {
        throw Error(ErrorKind::DimensionMismatch, "empty vector list");
    }
    const auto d = static_cast<Eigen::Index>(vectors.size());
    CMatrix m(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const CVector &v = vectors[static_cast<std::size_t>(j)];
        if (v.size() != d) {
            throw Error(ErrorKind::DimensionMismatch, "vector " + std::to_string(j) + " has length " +
                                                          std::to_string(v.size()) + ", expected " + std::to_string(d));
        }
        m.col(j) = v;
    }
    return ProjectorBasis(std::move(m), tol);
}

/// The dyads Gamma_{jk} = v_j v_k^dagger of a projector basis. Gamma_{jj} = I_j.
class DyadBasis {
   public:
    explicit DyadBasis(ProjectorBasis source) : src_(std::move(source)) {
    }

    [[nodiscard]] std::size_t dim() const noexcept {
        return src_.dim();
    }
    [[nodiscard]] const ProjectorBasis &source() const noexcept {
        return src_;
    }
    [[nodiscard]] const CMatrix &vectors() const noexcept {
        return src_.vectors();
    }
    [[nodiscard]] PseudoObservable dyad(std::size_t j, std::size_t k) const {
        src_.check_index(j);
        src_.check_index(k);
        const CMatrix &v = src_.vectors();
        return PseudoObservable(v.col(static_cast<Eigen::Index>(j)) * v.col(static_cast<Eigen::Index>(k)).adjoint());
    }
    [[nodiscard]] PseudoObservable projector(std::size_t j) const {
        return src_.projector(j);
    }

   private:
    ProjectorBasis src_;
};

/// Dyadic component <Gamma_{jk}, P> = tr(Gamma_{kj} P) = v_j^dagger P v_k.
inline Complex component(const PseudoObservable &p, std::size_t j, std::size_t k, const DyadBasis &basis) {
    if (p.dim() != basis.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "component: operand and basis dims differ");
    }
    basis.source().check_index(j);
    basis.source().check_index(k);
    const CMatrix &v = basis.vectors();
    return (v.col(static_cast<Eigen::Index>(j)).adjoint() * p.components() * v.col(static_cast<Eigen::Index>(k)))(0, 0);
}

/// All components at once: entry (j, k) is component(p, j, k, basis).
inline CMatrix components_in(const PseudoObservable &p, const DyadBasis &basis) {
    if (p.dim() != basis.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "components_in: operand and basis dims differ");
    }
    return basis.vectors().adjoint() * p.components() * basis.vectors();
}

/// sum_{jk} c_{jk} Gamma_{jk}
inline PseudoObservable from_components(const CMatrix &c, const DyadBasis &basis) {
    if (static_cast<std::size_t>(c.rows()) != basis.dim() || c.rows() != c.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "from_components: coefficient matrix and basis dims differ");
    }
    return PseudoObservable(basis.vectors() * c * basis.vectors().adjoint());
}

/// The unitary Omega taking one dyad basis to another:
/// Omega Gamma_{jk} Omega^dagger = Gamma~_{jk}.
class BasisChange {
   public:
    BasisChange(PseudoObservable omega, DyadBasis from, DyadBasis to, const Tolerances &tol = {})
        : omega_(std::move(omega)), from_(std::move(from)), to_(std::move(to)) {
        if (omega_.dim() != from_.dim() || from_.dim() != to_.dim()) {
            throw Error(ErrorKind::DimensionMismatch, "basis change dims differ");
        }
        if (!is_unitary(omega_, tol)) {
            throw Error(ErrorKind::NotUnitary, "basis change operator is not unitary");
        }
        // Omega v_k = w_k for every k is equivalent to the dyad relation.
        const double defect = detail::max_abs(omega_.components() * from_.vectors() - to_.vectors());
        if (defect > tol.unit) {
            throw Error(ErrorKind::VerificationFailure,
                        "Omega Gamma_jk Omega^dagger != Gamma~_jk, vector defect " + std::to_string(defect));
        }
    }

    [[nodiscard]] const PseudoObservable &omega() const noexcept {
        return omega_;
    }
    [[nodiscard]] const DyadBasis &from() const noexcept {
        return from_;
    }
    [[nodiscard]] const DyadBasis &to() const noexcept {
        return to_;
    }

    /// Omega X Omega^dagger
    [[nodiscard]] PseudoObservable conjugate(const PseudoObservable &x) const {
        return PseudoObservable(omega_.components() * x.components() * omega_.components().adjoint());
    }

   private:
    PseudoObservable omega_;
    DyadBasis from_;
    DyadBasis to_;
};

/// Omega = sum_k w_k u_k^dagger with u_k, w_k the k-th vectors of `from`, `to`.
inline BasisChange basis_change(const DyadBasis &from, const DyadBasis &to, const Tolerances &tol = {}) {
    if (from.dim() != to.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "basis_change: dims differ");
    }
    PseudoObservable omega(to.vectors() * from.vectors().adjoint());
    return BasisChange(std::move(omega), from, to, tol);
}

/// change(A->B) followed by change(B->C).
inline BasisChange compose(const BasisChange &first, const BasisChange &second, const Tolerances &tol = {}) {
    if (first.to().dim() != second.from().dim()) {
        throw Error(ErrorKind::DimensionMismatch, "compose: dims differ");
    }
    return BasisChange(mul(second.omega(), first.omega()), first.from(), second.to(), tol);
}

/// The image of a dyad basis under a unitary: vectors U v_k.
inline DyadBasis rotate(const DyadBasis &basis, const PseudoObservable &u, const Tolerances &tol = {}) {
    if (!is_unitary(u, tol)) {
        throw Error(ErrorKind::NotUnitary, "rotate: operator is not unitary");
    }
    return DyadBasis(ProjectorBasis(u.components() * basis.vectors(), tol));
}

/// The exchange unitary S_{k1 k0} = Gamma_{k1 k0} + Gamma_{k0 k1} + sum_{l != k0,k1} I_l,
/// so that Gamma_{j k0} = Gamma_{j k1} S_{k1 k0}.
inline PseudoObservable exchange_unitary(const DyadBasis &basis, std::size_t k1, std::size_t k0) {
    basis.source().check_index(k1);
    basis.source().check_index(k0);
    const CMatrix &v = basis.vectors();
    const Eigen::Index n = v.rows();
    Eigen::VectorXi perm(n);
    for (Eigen::Index l = 0; l < n; ++l) {
        perm[l] = static_cast<int>(l);
    }
    std::swap(perm[static_cast<Eigen::Index>(k0)], perm[static_cast<Eigen::Index>(k1)]);
    CMatrix s = CMatrix::Zero(n, n);
    for (Eigen::Index l = 0; l < n; ++l) {
        s += v.col(l) * v.col(perm[l]).adjoint();
    }
    return PseudoObservable(std::move(s));
}

/// A basis diagonalizing a commuting family, with the eigenvalue tuple of
/// every basis element (labels[j][a] is the eigenvalue of observable a).
struct CompatibleBasis {
    ProjectorBasis basis;
    std::vector<std::vector<double>> labels;
};

/// Simultaneous eigenbasis of a commuting Hermitian family.
///
/// Ordering is descending lexicographic in the eigenvalue tuples; each basis
/// vector has its largest-magnitude entry real positive. Joint eigenspaces
/// the family leaves degenerate get an arbitrary orthonormal completion.
inline CompatibleBasis complete_compatible_basis(const std::vector<Observable> &family, const Tolerances &tol = {}) {
    if (family.empty()) {
        throw Error(ErrorKind::DimensionMismatch, "complete_compatible_basis: empty family");
    }
    const std::size_t d = family.front().dim();
    std::vector<CMatrix> mats;
    for (const Observable &o : family) {
        if (o.dim() != d) {
            throw Error(ErrorKind::DimensionMismatch, "complete_compatible_basis: family dims differ");
        }
        if (!is_hermitian(o.value(), tol)) {
            throw Error(ErrorKind::NotHermitian, "complete_compatible_basis: member not Hermitian");
        }
        mats.push_back(o.components());
    }
    for (std::size_t a = 0; a < mats.size(); ++a) {
        for (std::size_t b = a + 1; b < mats.size(); ++b) {
            const double c = detail::max_abs(mats[a] * mats[b] - mats[b] * mats[a]);
            const double mag = detail::max_abs(mats[a]) * detail::max_abs(mats[b]);
            if (c > Tolerances::scaled(tol.comm, mag)) {
                throw Error(ErrorKind::NotCommuting, "members " + std::to_string(a) + " and " + std::to_string(b) +
                                                         " do not commute: |[A,B]| = " + std::to_string(c));
            }
        }
    }
    detail::JointEigen je = detail::joint_diagonalize(mats, tol.deg);
    return CompatibleBasis{ProjectorBasis(std::move(je.vectors), tol), std::move(je.labels)};
}

}  // namespace pobs
