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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pobs/algebra.hpp"
#include "pobs/bases.hpp"
#include "pobs/spectral.hpp"
#include "pobs/states.hpp"

namespace pobs {

/// D = sum_j p_j I_j over a projector basis.
class DensityObservable {
   public:
    DensityObservable(ProjectorBasis basis, std::vector<double> probabilities, bool clamped)
        : basis_(std::move(basis)), p_(std::move(probabilities)), clamped_(clamped) {
    }

    [[nodiscard]] std::size_t dim() const noexcept {
        return basis_.dim();
    }
    [[nodiscard]] const ProjectorBasis &basis() const noexcept {
        return basis_;
    }
    [[nodiscard]] const std::vector<double> &probabilities() const noexcept {
        return p_;
    }
    /// Set when tiny negative probabilities were clamped to zero on construction.
    [[nodiscard]] bool clamped() const noexcept {
        return clamped_;
    }

    [[nodiscard]] PseudoObservable matrix() const {
        const CMatrix &v = basis_.vectors();
        Eigen::VectorXcd p(static_cast<Eigen::Index>(p_.size()));
        for (std::size_t j = 0; j < p_.size(); ++j) {
            p[static_cast<Eigen::Index>(j)] = p_[j];
        }
        return PseudoObservable(v * p.asDiagonal() * v.adjoint());
    }
    [[nodiscard]] Observable observable() const {
        return Observable(matrix());
    }

    /// Index j' with p_j = delta_{j j'}, if the state is pure.
    [[nodiscard]] std::optional<std::size_t> pure_index(const Tolerances &tol = {}) const {
        for (std::size_t j = 0; j < p_.size(); ++j) {
            if (std::abs(p_[j] - 1.0) <= tol.prob) {
                return j;
            }
        }
        return std::nullopt;
    }

   private:
    ProjectorBasis basis_;
    std::vector<double> p_;
    bool clamped_;
};

/// Validates a distribution and builds the density. Entries in [-eps, 0) are
/// clamped to 0 and the distribution renormalized; `clamped()` records it.
inline DensityObservable make_density(const ProjectorBasis &basis, std::vector<double> p, const Tolerances &tol = {}) {
    if (p.size() != basis.dim()) {
        throw Error(ErrorKind::InvalidDistribution, "expected " + std::to_string(basis.dim()) + " probabilities, got " +
                                                        std::to_string(p.size()));
    }
    double sum = 0.0;
    bool clamped = false;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (!std::isfinite(p[j]) || p[j] < -tol.prob || p[j] > 1.0 + tol.prob) {
            throw Error(ErrorKind::InvalidDistribution, "p_" + std::to_string(j) + " = " + std::to_string(p[j]) +
                                                            " outside [0, 1]");
        }
        if (p[j] < 0.0) {
            p[j] = 0.0;
            clamped = true;
        }
        sum += p[j];
    }
    if (std::abs(sum - 1.0) > tol.prob) {
        throw Error(ErrorKind::InvalidDistribution, "probabilities sum to " + std::to_string(sum));
    }
    if (clamped) {
        for (double &x : p) {
            x /= sum;
        }
    }
    for (double &x : p) {
        x = std::min(x, 1.0);
    }
    return DensityObservable(basis, std::move(p), clamped);
}

inline DensityObservable pure_density(const ProjectorBasis &basis, std::size_t j) {
    basis.check_index(j);
    std::vector<double> p(basis.dim(), 0.0);
    p[j] = 1.0;
    return DensityObservable(basis, std::move(p), false);
}

/// <Z> = tr(D Z) = <D, Z>.
inline Complex expectation(const PseudoObservable &z, const DensityObservable &d) {
    if (z.dim() != d.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "expectation: dims differ");
    }
    const CMatrix &v = d.basis().vectors();
    Complex s{};
    for (std::size_t j = 0; j < d.dim(); ++j) {
        const auto c = v.col(static_cast<Eigen::Index>(j));
        s += d.probabilities()[j] * (c.adjoint() * z.components() * c)(0, 0);
    }
    return s;
}

/// B_A = sum_j I_{A,j} B I_{A,j} = sum_j b_{A,j} I_{A,j}.
inline Observable project_observable(const Observable &b, const ProjectorBasis &a, const Tolerances &tol = {}) {
    if (b.dim() != a.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "project_observable: dims differ");
    }
    if (!is_hermitian(b.value(), tol)) {
        throw Error(ErrorKind::NotHermitian, "project_observable: B not Hermitian");
    }
    const CMatrix &v = a.vectors();
    Eigen::VectorXcd coeff(v.cols());
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        coeff[j] = (v.col(j).adjoint() * b.components() * v.col(j))(0, 0).real();
    }
    return Observable(CMatrix(v * coeff.asDiagonal() * v.adjoint()));
}

/// Transition probabilities p_{Bj,k} = tr(I_{A,j} I_{B,k}) = |<a_j, b_k>|^2.
struct TransitionMatrix {
    Eigen::MatrixXd entries;  // row j: from A_j, column k: to B_k

    [[nodiscard]] std::size_t dim() const noexcept {
        return static_cast<std::size_t>(entries.rows());
    }
    /// Largest deviation of any row or column sum from 1.
    [[nodiscard]] double stochastic_defect() const {
        const Eigen::VectorXd rows = entries.rowwise().sum();
        const Eigen::RowVectorXd cols = entries.colwise().sum();
        return std::max((rows.array() - 1.0).abs().maxCoeff(), (cols.array() - 1.0).abs().maxCoeff());
    }
};

inline TransitionMatrix transition_matrix(const ProjectorBasis &a, const ProjectorBasis &b) {
    if (a.dim() != b.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "transition_matrix: dims differ");
    }
    const CMatrix overlaps = a.vectors().adjoint() * b.vectors();
    return TransitionMatrix{overlaps.cwiseAbs2()};
}

/// D_{A,B} = sum_k I_{B,k} D I_{B,k}, with p_{AB,k} = sum_j p_{A,j} p_{Bj,k}.
inline DensityObservable project_density(const DensityObservable &d, const ProjectorBasis &b,
                                         const Tolerances &tol = {}) {
    if (d.dim() != b.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "project_density: dims differ");
    }
    const TransitionMatrix t = transition_matrix(d.basis(), b);
    std::vector<double> q(d.dim(), 0.0);
    for (std::size_t k = 0; k < d.dim(); ++k) {
        for (std::size_t j = 0; j < d.dim(); ++j) {
            q[k] += d.probabilities()[j] * t.entries(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k));
        }
    }
    return make_density(b, std::move(q), tol);
}

/// The three evaluations of a conditioned expectation value, which must agree:
/// tr(D_A B_A), tr(D_{A,B} B) with B's own eigenbasis, and tr(D_A B).
struct ConditionalRoutes {
    double via_projected_observable;
    double via_projected_density;
    double direct;

    [[nodiscard]] double spread() const {
        return std::max({std::abs(via_projected_observable - via_projected_density),
                         std::abs(via_projected_observable - direct), std::abs(via_projected_density - direct)});
    }
};

inline ConditionalRoutes conditional_expectation_routes(const Observable &b, const DensityObservable &d,
                                                        const Tolerances &tol = {}) {
    if (b.dim() != d.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "conditional_expectation: dims differ");
    }
    if (!is_hermitian(b.value(), tol)) {
        throw Error(ErrorKind::NotHermitian, "conditional_expectation: B not Hermitian");
    }
    const Observable b_a = project_observable(b, d.basis(), tol);
    const double r1 = trace(mul(d.matrix(), b_a.value())).real();
    const ProjectorBasis b_basis = decompose(b, tol).basis;
    const DensityObservable d_ab = project_density(d, b_basis, tol);
    const double r2 = trace(mul(d_ab.matrix(), b.value())).real();
    const double r3 = trace(mul(d.matrix(), b.value())).real();
    return {r1, r2, r3};
}

/// <B>_A = tr(D_A B_A).
inline double conditional_expectation(const Observable &b, const DensityObservable &d, const Tolerances &tol = {}) {
    return conditional_expectation_routes(b, d, tol).via_projected_observable;
}

struct Deviation {
    Observable delta;  // A - <A>
    double variance;
    double stddev;
};

inline Deviation deviation_variance(const Observable &a, const DensityObservable &d, const Tolerances &tol = {}) {
    if (!is_hermitian(a.value(), tol)) {
        throw Error(ErrorKind::NotHermitian, "deviation_variance: A not Hermitian");
    }
    const double mean = expectation(a, d).real();
    CMatrix delta = a.components() - mean * CMatrix::Identity(a.components().rows(), a.components().cols());
    delta = (delta + delta.adjoint()).eval() * 0.5;
    const double var = std::max(0.0, expectation(PseudoObservable(delta * delta), d).real());
    return Deviation{Observable(std::move(delta)), var, std::sqrt(var)};
}

struct UncertaintyCheck {
    double lhs;                 // sigma_A sigma_B
    double rhs;                 // |<i[A,B]>| / 2
    bool holds;                 // lhs >= rhs - eps
    double commutator_defect;   // |[dA, dB] - [A, B]|
};

inline UncertaintyCheck uncertainty_check(const Observable &a, const Observable &b, const DensityObservable &d,
                                          double eps = 1e-10, const Tolerances &tol = {}) {
    detail::require_same_dim(a.value(), b.value(), "uncertainty_check");
    const Deviation da = deviation_variance(a, d, tol);
    const Deviation db = deviation_variance(b, d, tol);
    const PseudoObservable ab = commutator(a, b);
    const Complex mean = expectation(scale(Complex(0.0, 1.0), ab), d);
    UncertaintyCheck out{};
    out.lhs = da.stddev * db.stddev;
    out.rhs = 0.5 * std::abs(mean);
    out.holds = out.lhs >= out.rhs - eps;
    out.commutator_defect = distance(commutator(da.delta, db.delta), ab);
    return out;
}

/// Loewner order: O1 <= O2 iff O2 - O1 is positive semidefinite (to eps).
inline bool loewner_leq(const Observable &o1, const Observable &o2, const Tolerances &tol = {}) {
    detail::require_same_dim(o1.value(), o2.value(), "loewner_leq");
    const detail::EigenPairs ep = detail::hermitian_eigen(o2.components() - o1.components());
    return ep.values.minCoeff() >= -tol.herm;
}

/// varpi_{jk} = <Psi_j, P Psi_k>.
inline Complex matrix_element(const PseudoObservable &p, const StateVectorSet &set, std::size_t j, std::size_t k) {
    if (p.dim() != set.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "matrix_element: dims differ");
    }
    return inner(set.member(j), mul(p, set.member(k)));
}

struct OutcomeProbability {
    double value;
    double probability;
};

namespace detail {

/// Eigenvalue of O_r on each member of the set; NotInFamily if some member
/// is not a right eigenvector.
inline std::vector<double> member_eigenvalues(const Observable &o, const StateVectorSet &set, const Tolerances &tol) {
    std::vector<double> out;
    const double band = Tolerances::scaled(tol.eig, detail::max_abs(o.components()));
    for (std::size_t j = 0; j < set.dim(); ++j) {
        const PseudoObservable psi = set.member(j);
        const PseudoObservable applied = mul(o, psi);
        const double value = inner(psi, applied).real();
        if ((applied.components() - value * psi.components()).norm() > band) {
            throw Error(ErrorKind::NotInFamily,
                        "observable is not diagonal on eigenstate " + std::to_string(j) + " of the set");
        }
        out.push_back(value);
    }
    return out;
}

}  // namespace detail

/// p(O_r = o) for each distinct outcome o of O_r, for a normalized Phi in the
/// eigenstate space of `set`.
inline std::vector<OutcomeProbability> born_distribution(const PseudoObservable &phi, const StateVectorSet &set,
                                                         const Observable &o_r, const Tolerances &tol = {}) {
    detail::require_same_dim(phi, o_r.value(), "born_rule");
    if (std::abs(norm(phi) - 1.0) > tol.norm) {
        throw Error(ErrorKind::NotNormalized, "born_rule: |Phi| = " + std::to_string(norm(phi)));
    }
    const std::vector<double> o = detail::member_eigenvalues(o_r, set, tol);
    const WaveFunction wf = wave_function(phi, set, {}, tol);
    Eigen::VectorXd values(static_cast<Eigen::Index>(o.size()));
    for (std::size_t j = 0; j < o.size(); ++j) {
        values[static_cast<Eigen::Index>(j)] = o[j];
    }
    const double band = detail::degeneracy_band(values, tol.deg);
    std::vector<OutcomeProbability> out;
    for (std::size_t j = 0; j < o.size(); ++j) {
        const double pj = std::norm(wf.amplitudes[j]);
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const OutcomeProbability &x) { return std::abs(x.value - o[j]) <= band; });
        if (it == out.end()) {
            out.push_back({o[j], pj});
        } else {
            it->probability += pj;
        }
    }
    std::sort(out.begin(), out.end(), [](const auto &x, const auto &y) { return x.value > y.value; });
    return out;
}

/// p(O_r = o) = sum_o |phi(o)|^2 delta_{o_r, o}.
inline double born_rule(const PseudoObservable &phi, const StateVectorSet &set, const Observable &o_r, double o,
                        const Tolerances &tol = {}) {
    const auto dist = born_distribution(phi, set, o_r, tol);
    double mag = 1.0;
    for (const auto &x : dist) {
        mag = std::max(mag, std::abs(x.value));
    }
    for (const auto &x : dist) {
        if (std::abs(x.value - o) <= tol.deg * mag) {
            return x.probability;
        }
    }
    throw Error(ErrorKind::NotInSpectrum, "born_rule: " + std::to_string(o) + " is not an eigenvalue of O_r");
}

}  // namespace pobs
