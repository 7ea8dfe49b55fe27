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
#include <string>
#include <utility>

#include "pobs/config.hpp"

namespace pobs {

/// An element of the pseudo-observable algebra.
///
/// Stored as its d x d component matrix relative to the reference
/// (computational) dyad basis: P = sum_{jk} components(j, k) Gamma_{jk}.
/// Every other basis is data handed to the operations, never a
/// representation. Values are immutable once constructed.
class PseudoObservable {
   public:
    explicit PseudoObservable(CMatrix components) : m_(std::move(components)) {
        if (m_.rows() < 1 || m_.rows() != m_.cols()) {
            throw Error(ErrorKind::DimensionMismatch,
                        "component matrix must be square with dim >= 1, got " + std::to_string(m_.rows()) + "x" +
                            std::to_string(m_.cols()));
        }
        if (!m_.allFinite()) {
            throw Error(ErrorKind::NonFinite, "component matrix contains NaN or Inf");
        }
    }

    static PseudoObservable zero(std::size_t d) {
        return PseudoObservable(CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
    }
    static PseudoObservable identity(std::size_t d) {
        return PseudoObservable(CMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
    }
    static PseudoObservable constant(std::size_t d, Complex c) {
        return PseudoObservable(c * CMatrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
    }

    [[nodiscard]] std::size_t dim() const noexcept {
        return static_cast<std::size_t>(m_.rows());
    }
    [[nodiscard]] const CMatrix &components() const noexcept {
        return m_;
    }
    [[nodiscard]] Complex operator()(std::size_t j, std::size_t k) const {
        return m_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
    }

   private:
    CMatrix m_;
};

namespace detail {

inline void require_same_dim(const PseudoObservable &a, const PseudoObservable &b, const char *op) {
    if (a.dim() != b.dim()) {
        throw Error(ErrorKind::DimensionMismatch, std::string(op) + ": dims " + std::to_string(a.dim()) + " and " +
                                                      std::to_string(b.dim()));
    }
}

/// Max-abs entry; the norm used for tolerance scaling.
inline double max_abs(const CMatrix &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermitian_defect(const CMatrix &m) {
    return max_abs(m - m.adjoint());
}

inline double unitary_defect(const CMatrix &m) {
    return max_abs(m * m.adjoint() - CMatrix::Identity(m.rows(), m.cols()));
}

}  // namespace detail

inline PseudoObservable add(const PseudoObservable &p, const PseudoObservable &q) {
    detail::require_same_dim(p, q, "add");
    return PseudoObservable(p.components() + q.components());
}

inline PseudoObservable subtract(const PseudoObservable &p, const PseudoObservable &q) {
    detail::require_same_dim(p, q, "subtract");
    return PseudoObservable(p.components() - q.components());
}

/// Product; components compose as zeta_{jk} = sum_l p_{jl} q_{lk}.
inline PseudoObservable mul(const PseudoObservable &p, const PseudoObservable &q) {
    detail::require_same_dim(p, q, "mul");
    return PseudoObservable(p.components() * q.components());
}

inline PseudoObservable scale(Complex c, const PseudoObservable &p) {
    return PseudoObservable(c * p.components());
}

inline PseudoObservable dagger(const PseudoObservable &z) {
    return PseudoObservable(z.components().adjoint());
}

inline PseudoObservable commutator(const PseudoObservable &x, const PseudoObservable &y) {
    detail::require_same_dim(x, y, "commutator");
    return PseudoObservable(x.components() * y.components() - y.components() * x.components());
}

inline PseudoObservable operator+(const PseudoObservable &p, const PseudoObservable &q) {
    return add(p, q);
}
inline PseudoObservable operator-(const PseudoObservable &p, const PseudoObservable &q) {
    return subtract(p, q);
}
inline PseudoObservable operator-(const PseudoObservable &p) {
    return PseudoObservable(-p.components());
}
inline PseudoObservable operator*(const PseudoObservable &p, const PseudoObservable &q) {
    return mul(p, q);
}
inline PseudoObservable operator*(Complex c, const PseudoObservable &p) {
    return scale(c, p);
}
inline PseudoObservable operator*(double c, const PseudoObservable &p) {
    return scale(Complex(c, 0.0), p);
}

/// Max-abs component difference.
inline double distance(const PseudoObservable &p, const PseudoObservable &q) {
    detail::require_same_dim(p, q, "distance");
    return detail::max_abs(p.components() - q.components());
}

inline bool is_hermitian(const PseudoObservable &p, const Tolerances &tol = {}) {
    const double mag = detail::max_abs(p.components());
    return detail::hermitian_defect(p.components()) <= Tolerances::scaled(tol.herm, mag);
}

inline bool is_unitary(const PseudoObservable &p, const Tolerances &tol = {}) {
    return detail::unitary_defect(p.components()) <= tol.unit;
}

/// A Hermitian pseudo-observable.
class Observable {
   public:
    explicit Observable(PseudoObservable p, const Tolerances &tol = {}) : p_(std::move(p)) {
        const double mag = detail::max_abs(p_.components());
        const double defect = detail::hermitian_defect(p_.components());
        if (defect > Tolerances::scaled(tol.herm, mag)) {
            throw Error(ErrorKind::NotHermitian, "max |z_jk - conj(z_kj)| = " + std::to_string(defect));
        }
    }
    explicit Observable(CMatrix m, const Tolerances &tol = {}) : Observable(PseudoObservable(std::move(m)), tol) {
    }

    [[nodiscard]] std::size_t dim() const noexcept {
        return p_.dim();
    }
    [[nodiscard]] const CMatrix &components() const noexcept {
        return p_.components();
    }
    [[nodiscard]] const PseudoObservable &value() const noexcept {
        return p_;
    }
    operator const PseudoObservable &() const noexcept {  // NOLINT(google-explicit-constructor)
        return p_;
    }

   private:
    PseudoObservable p_;
};

/// A Hermitian idempotent; elementary iff its trace is 1.
class Projector {
   public:
    explicit Projector(Observable o, const Tolerances &tol = {}) : o_(std::move(o)) {
        const CMatrix &m = o_.components();
        const double defect = detail::max_abs(m * m - m);
        if (defect > Tolerances::scaled(tol.idem, detail::max_abs(m))) {
            throw Error(ErrorKind::NotIdempotent, "|J^2 - J| = " + std::to_string(defect));
        }
        elementary_ = std::abs(m.trace() - Complex(1.0, 0.0)) <= tol.tr;
    }
    explicit Projector(CMatrix m, const Tolerances &tol = {}) : Projector(Observable(std::move(m), tol), tol) {
    }

    /// Rank-1 projector v v^dagger for a unit vector v.
    static Projector from_vector(const CVector &v, const Tolerances &tol = {}) {
        return Projector(CMatrix(v * v.adjoint()), tol);
    }

    [[nodiscard]] bool elementary() const noexcept {
        return elementary_;
    }
    [[nodiscard]] std::size_t dim() const noexcept {
        return o_.dim();
    }
    [[nodiscard]] const CMatrix &components() const noexcept {
        return o_.components();
    }
    [[nodiscard]] const Observable &observable() const noexcept {
        return o_;
    }
    operator const PseudoObservable &() const noexcept {  // NOLINT(google-explicit-constructor)
        return o_.value();
    }

   private:
    Observable o_;
    bool elementary_ = false;
};

/// Z = Z_R + i Z_I with both parts Hermitian.
inline std::pair<Observable, Observable> real_imag_parts(const PseudoObservable &z) {
    const CMatrix &m = z.components();
    CMatrix re = (m + m.adjoint()) * 0.5;
    CMatrix im = (m - m.adjoint()) * Complex(0.0, -0.5);
    // Both are Hermitian up to rounding in the last bit; symmetrize exactly.
    re = (re + re.adjoint()).eval() * 0.5;
    im = (im + im.adjoint()).eval() * 0.5;
    return {Observable(std::move(re)), Observable(std::move(im))};
}

}  // namespace pobs
