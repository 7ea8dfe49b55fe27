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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pobs/algebra.hpp"
#include "pobs/bases.hpp"
#include "pobs/detail/eigensolve.hpp"
#include "pobs/spectral.hpp"

namespace pobs {

namespace detail {

/// Unitary whose column `slot` is the unit vector `a`; the remaining columns
/// come from Gram-Schmidt over the standard basis, each phase-fixed.
inline CMatrix complete_unitary(const CVector &a, Eigen::Index slot) {
    const Eigen::Index n = a.size();
    std::vector<CVector> cols{a};
    for (Eigen::Index e = 0; e < n && static_cast<Eigen::Index>(cols.size()) < n; ++e) {
        CVector v = CVector::Unit(n, e);
        for (int pass = 0; pass < 2; ++pass) {
            for (const CVector &c : cols) {
                v -= c * c.dot(v);
            }
        }
        const double nv = v.norm();
        if (nv > 1e-6) {
            v /= nv;
            fix_phase(v);
            cols.push_back(v);
        }
    }
    CMatrix u(n, n);
    Eigen::Index next = 1;
    for (Eigen::Index c = 0; c < n; ++c) {
        u.col(c) = c == slot ? cols[0] : cols[static_cast<std::size_t>(next++)];
    }
    return u;
}

}  // namespace detail

/// The set {Psi_j = Gamma_{j k0} K} for a dyad basis, an anchor index k0
/// and a unitary K. Members satisfy Psi_j Psi_k^dagger = Gamma_{jk}.
///
/// Every member factors as v_j r with the row r = v_{k0}^dagger K, so a set
/// is fixed by its basis vectors and r alone; K beyond that row is free.
class StateVectorSet {
   public:
    StateVectorSet(DyadBasis basis, std::size_t k0, PseudoObservable k, const Tolerances &tol = {})
        : basis_(std::move(basis)), k0_(k0), k_(std::move(k)) {
        basis_.source().check_index(k0_);
        if (k_.dim() != basis_.dim()) {
            throw Error(ErrorKind::DimensionMismatch, "state vector set: K and basis dims differ");
        }
        if (!is_unitary(k_, tol)) {
            throw Error(ErrorKind::NotUnitary, "state vector set: K is not unitary");
        }
    }

    [[nodiscard]] std::size_t dim() const noexcept {
        return basis_.dim();
    }
    [[nodiscard]] const DyadBasis &basis() const noexcept {
        return basis_;
    }
    [[nodiscard]] std::size_t k0() const noexcept {
        return k0_;
    }
    [[nodiscard]] const PseudoObservable &k() const noexcept {
        return k_;
    }

    /// Psi_j = Gamma_{j k0} K
    [[nodiscard]] PseudoObservable member(std::size_t j) const {
        basis_.source().check_index(j);
        return PseudoObservable(basis_.vectors().col(static_cast<Eigen::Index>(j)) * anchor_row());
    }
    [[nodiscard]] std::vector<PseudoObservable> members() const {
        std::vector<PseudoObservable> out;
        for (std::size_t j = 0; j < dim(); ++j) {
            out.push_back(member(j));
        }
        return out;
    }

    /// r = v_{k0}^dagger K
    [[nodiscard]] Eigen::RowVectorXcd anchor_row() const {
        return basis_.vectors().col(static_cast<Eigen::Index>(k0_)).adjoint() * k_.components();
    }

    /// Largest violation of Psi_j Psi_k^dagger = Gamma_{jk} and
    /// <Psi_j, Psi_k> = delta_{jk}.
    [[nodiscard]] double invariant_defect() const {
        const auto psi = members();
        double worst = 0.0;
        for (std::size_t j = 0; j < dim(); ++j) {
            for (std::size_t k = 0; k < dim(); ++k) {
                const CMatrix prod = psi[j].components() * psi[k].components().adjoint();
                worst = std::max(worst, detail::max_abs(prod - basis_.dyad(j, k).components()));
                const Complex ip = inner(psi[j], psi[k]);
                worst = std::max(worst, std::abs(ip - Complex(j == k ? 1.0 : 0.0, 0.0)));
            }
        }
        return worst;
    }

   private:
    DyadBasis basis_;
    std::size_t k0_;
    PseudoObservable k_;
};

inline StateVectorSet make_state_vectors(const DyadBasis &basis, std::size_t k0, const PseudoObservable &k,
                                         const Tolerances &tol = {}) {
    return StateVectorSet(basis, k0, k, tol);
}

struct Characterization {
    bool holds = false;
    double defect = 0.0;  // max |Psi_j Psi_k^dagger - Gamma_jk|
    std::optional<StateVectorSet> factorization;
};

/// Checks Psi_j Psi_k^dagger = Gamma_{jk} for a candidate family and, when it
/// holds, recovers a factorization Psi_j = Gamma_{j k0} K.
///
/// The family fixes only the row v_{k0}^dagger K; the rest of K is the
/// deterministic completion of `detail::complete_unitary`.
inline Characterization verify_characterization(const std::vector<PseudoObservable> &family, const DyadBasis &basis,
                                                std::size_t k0 = 0, const Tolerances &tol = {}) {
    if (family.size() != basis.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "verify_characterization: family has " +
                                                      std::to_string(family.size()) + " members, basis dim " +
                                                      std::to_string(basis.dim()));
    }
    for (const auto &psi : family) {
        if (psi.dim() != basis.dim()) {
            throw Error(ErrorKind::DimensionMismatch, "verify_characterization: member dim differs from basis");
        }
    }
    basis.source().check_index(k0);
    Characterization out;
    for (std::size_t j = 0; j < family.size(); ++j) {
        for (std::size_t k = 0; k < family.size(); ++k) {
            const CMatrix prod = family[j].components() * family[k].components().adjoint();
            out.defect = std::max(out.defect, detail::max_abs(prod - basis.dyad(j, k).components()));
        }
    }
    out.holds = out.defect <= tol.sv;
    if (!out.holds) {
        return out;
    }
    const auto kk = static_cast<Eigen::Index>(k0);
    const CVector vk0 = basis.vectors().col(kk);
    // r = v_{k0}^dagger Psi_{k0}; K = V W^dagger with W's column k0 equal to r^dagger.
    const Eigen::RowVectorXcd r = vk0.adjoint() * family[k0].components();
    const CMatrix w = detail::complete_unitary(r.adjoint(), kk);
    PseudoObservable k(basis.vectors() * w.adjoint());
    StateVectorSet set(basis, k0, k, tol);
    double reexpansion = 0.0;
    for (std::size_t j = 0; j < family.size(); ++j) {
        reexpansion = std::max(reexpansion, distance(set.member(j), family[j]));
    }
    if (reexpansion > tol.sv) {
        throw Error(ErrorKind::VerificationFailure,
                    "recovered factorization does not re-expand, defect " + std::to_string(reexpansion));
    }
    out.factorization = std::move(set);
    return out;
}

/// Psi~_j = e^{i theta_j} Psi_j Y.
///
/// The result is a state-vector set over the same projector basis; its dyads
/// are those of the rephased vectors e^{i theta_j} v_j.
inline StateVectorSet equivalent_set(const StateVectorSet &set, const std::vector<double> &phases,
                                     const PseudoObservable &y, const Tolerances &tol = {}) {
    if (phases.size() != set.dim() || y.dim() != set.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "equivalent_set: phases or Y have the wrong dimension");
    }
    if (!is_unitary(y, tol)) {
        throw Error(ErrorKind::NotUnitary, "equivalent_set: Y is not unitary");
    }
    CMatrix v = set.basis().vectors();
    for (std::size_t j = 0; j < phases.size(); ++j) {
        v.col(static_cast<Eigen::Index>(j)) *= std::polar(1.0, phases[j]);
    }
    const Complex anchor = std::polar(1.0, phases[set.k0()]);
    PseudoObservable k(anchor * set.k().components() * y.components());
    return StateVectorSet(DyadBasis(ProjectorBasis(std::move(v), tol)), set.k0(), std::move(k), tol);
}

struct EquivalenceWitness {
    std::vector<double> phases;
    PseudoObservable y;
};

/// Phases and unitary Y with to.member(j) = e^{i theta_j} from.member(j) Y,
/// or nothing when the two sets live on different projector bases.
inline std::optional<EquivalenceWitness> equivalence_witness(const StateVectorSet &from, const StateVectorSet &to,
                                                             const Tolerances &tol = {}) {
    if (from.dim() != to.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "equivalence_witness: dims differ");
    }
    const CMatrix &v = from.basis().vectors();
    const CMatrix &w = to.basis().vectors();
    std::vector<double> phases;
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        const Complex overlap = v.col(j).dot(w.col(j));
        if (std::abs(std::abs(overlap) - 1.0) > tol.sv) {
            return std::nullopt;
        }
        phases.push_back(std::arg(overlap));
    }
    // Members are v_j r and w_j s: need r Y = s, i.e. Y^dagger r^dagger = s^dagger.
    const CVector a = from.anchor_row().adjoint();
    const CVector b = to.anchor_row().adjoint();
    const CMatrix ua = detail::complete_unitary(a, 0);
    const CMatrix ub = detail::complete_unitary(b, 0);
    PseudoObservable y(ua * ub.adjoint());
    double defect = 0.0;
    for (std::size_t j = 0; j < from.dim(); ++j) {
        const CMatrix lhs = std::polar(1.0, phases[j]) * from.member(j).components() * y.components();
        defect = std::max(defect, detail::max_abs(lhs - to.member(j).components()));
    }
    if (defect > tol.sv) {
        return std::nullopt;
    }
    return EquivalenceWitness{std::move(phases), std::move(y)};
}

/// Column (varpi_{j'j})_{j'} with P Psi_j = sum_{j'} varpi_{j'j} Psi_{j'}.
inline CVector left_action(const PseudoObservable &p, const StateVectorSet &set, std::size_t j) {
    if (p.dim() != set.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "left_action: dims differ");
    }
    set.basis().source().check_index(j);
    const CMatrix &v = set.basis().vectors();
    return v.adjoint() * p.components() * v.col(static_cast<Eigen::Index>(j));
}

/// Modified Gram-Schmidt in the inner product <X, Y> = tr(X^dagger Y).
/// The first output is the first input scaled to unit norm.
inline std::vector<PseudoObservable> gram_schmidt(const std::vector<PseudoObservable> &input,
                                                  const Tolerances &tol = {}) {
    std::vector<PseudoObservable> out;
    for (std::size_t i = 0; i < input.size(); ++i) {
        if (!out.empty() && input[i].dim() != out.front().dim()) {
            throw Error(ErrorKind::DimensionMismatch, "gram_schmidt: dims differ");
        }
        const double scale = std::max(1.0, norm(input[i]));
        CMatrix v = input[i].components();
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto &e : out) {
                const Complex c = e.components().conjugate().cwiseProduct(v).sum();
                v -= c * e.components();
            }
        }
        const double nv = v.norm();
        if (nv <= tol.lin * scale) {
            throw Error(ErrorKind::LinearlyDependent, "gram_schmidt: element " + std::to_string(i) +
                                                          " is in the span of the preceding ones");
        }
        out.emplace_back(v / nv);
    }
    return out;
}

namespace detail {

/// Coefficients <Psi_k, Phi> and the residual of the expansion.
inline std::pair<CVector, double> expand_in_set(const PseudoObservable &phi, const StateVectorSet &set) {
    if (phi.dim() != set.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "expansion: dims differ");
    }
    const auto psi = set.members();
    CVector c(static_cast<Eigen::Index>(set.dim()));
    CMatrix rebuilt = CMatrix::Zero(phi.components().rows(), phi.components().cols());
    for (std::size_t k = 0; k < psi.size(); ++k) {
        c[static_cast<Eigen::Index>(k)] = inner(psi[k], phi);
        rebuilt += c[static_cast<Eigen::Index>(k)] * psi[k].components();
    }
    return {c, (rebuilt - phi.components()).norm()};
}

}  // namespace detail

/// Turns an orthonormal basis {Phi_j} of the eigenstate space of `set` into
/// an eigenstate set, together with the unitary Omega = sum varphi_{kk'} Gamma_{kk'}
/// (varphi_{kj} = <Psi_k, Phi_j>) for which Phi_j Phi_j'^dagger = Omega Gamma_{jj'} Omega^dagger.
inline std::pair<StateVectorSet, BasisChange> orthonormal_basis_to_eigenstate_set(
    const std::vector<PseudoObservable> &phis, const StateVectorSet &set, const Tolerances &tol = {}) {
    const std::size_t d = set.dim();
    if (phis.size() != d) {
        throw Error(ErrorKind::DimensionMismatch, "orthonormal_basis_to_eigenstate_set: need exactly d elements");
    }
    for (std::size_t j = 0; j < d; ++j) {
        if (phis[j].dim() != d) {
            throw Error(ErrorKind::DimensionMismatch, "orthonormal_basis_to_eigenstate_set: element dims differ");
        }
        for (std::size_t k = 0; k < d; ++k) {
            const Complex g = inner(phis[j], phis[k]);
            if (std::abs(g - Complex(j == k ? 1.0 : 0.0, 0.0)) > tol.sv) {
                throw Error(ErrorKind::NotOrthonormal, "<Phi_" + std::to_string(j) + ", Phi_" + std::to_string(k) +
                                                           "> = " + std::to_string(std::abs(g)));
            }
        }
    }
    const auto n = static_cast<Eigen::Index>(d);
    CMatrix varphi(n, n);
    for (std::size_t j = 0; j < d; ++j) {
        auto [c, residual] = detail::expand_in_set(phis[j], set);
        if (residual > tol.sv) {
            throw Error(ErrorKind::NotInSpan, "Phi_" + std::to_string(j) + " is outside the eigenstate space, residual " +
                                                  std::to_string(residual));
        }
        varphi.col(static_cast<Eigen::Index>(j)) = c;
    }
    const CMatrix &v = set.basis().vectors();
    PseudoObservable omega(v * varphi * v.adjoint());
    if (!is_unitary(omega, tol)) {
        throw Error(ErrorKind::VerificationFailure, "Omega is not unitary");
    }
    DyadBasis rotated(ProjectorBasis(v * varphi, tol));
    BasisChange change(omega, set.basis(), rotated, tol);
    StateVectorSet out(rotated, set.k0(), mul(omega, set.k()), tol);
    for (std::size_t j = 0; j < d; ++j) {
        const double defect = distance(out.member(j), phis[j]);
        if (defect > tol.sv) {
            throw Error(ErrorKind::VerificationFailure,
                        "eigenstate set member " + std::to_string(j) + " differs from Phi_j by " + std::to_string(defect));
        }
    }
    return {std::move(out), std::move(change)};
}

/// Amplitudes phi(o) = <Psi_o, Phi> over an eigenstate set, each labelled by
/// the eigenvalue tuple o of its basis element.
struct WaveFunction {
    std::vector<std::vector<double>> labels;
    std::vector<Complex> amplitudes;

    [[nodiscard]] double norm() const {
        double s = 0.0;
        for (const Complex &a : amplitudes) {
            s += std::norm(a);
        }
        return std::sqrt(s);
    }
    /// |phi(o)|^2 per label.
    [[nodiscard]] std::vector<double> probabilities() const {
        std::vector<double> p;
        for (const Complex &a : amplitudes) {
            p.push_back(std::norm(a));
        }
        return p;
    }
};

/// sum_o conj(phi1(o)) phi2(o)
inline Complex inner(const WaveFunction &a, const WaveFunction &b) {
    if (a.amplitudes.size() != b.amplitudes.size()) {
        throw Error(ErrorKind::DimensionMismatch, "wave function inner product: sizes differ");
    }
    Complex s{};
    for (std::size_t i = 0; i < a.amplitudes.size(); ++i) {
        s += std::conj(a.amplitudes[i]) * b.amplitudes[i];
    }
    return s;
}

/// Labels may be empty, in which case each element is labelled by its index.
inline WaveFunction wave_function(const PseudoObservable &phi, const StateVectorSet &set,
                                  std::vector<std::vector<double>> labels = {}, const Tolerances &tol = {}) {
    if (labels.empty()) {
        for (std::size_t j = 0; j < set.dim(); ++j) {
            labels.push_back({static_cast<double>(j)});
        }
    }
    if (labels.size() != set.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "wave_function: need one label per eigenstate");
    }
    auto [c, residual] = detail::expand_in_set(phi, set);
    if (residual > tol.lin * std::max(1.0, norm(phi))) {
        throw Error(ErrorKind::NotInSpan, "wave_function: element outside the eigenstate space, residual " +
                                              std::to_string(residual));
    }
    WaveFunction wf{std::move(labels), {}};
    for (Eigen::Index k = 0; k < c.size(); ++k) {
        wf.amplitudes.push_back(c[k]);
    }
    return wf;
}

struct LemmaCheck {
    bool premise = false;           // |IJI - I|_F <= eps
    double premise_defect = 0.0;    // |IJI - I|_F
    double conclusion_defect = 0.0; // |I - J|_F
};

/// For elementary projectors I and J, IJI = I implies I = J.
///
/// For rank-1 projectors |I - J|_F = sqrt(2 |IJI - I|_F) exactly, so a
/// premise that holds only to eps can move J by up to sqrt(2 eps). The
/// conclusion band is therefore tol.lemma + sqrt(2 * premise_defect); a
/// violation of that band throws VerificationFailure.
inline LemmaCheck lemma_elementary_equality(const Projector &i, const Projector &j, const Tolerances &tol = {}) {
    if (i.dim() != j.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "lemma: dims differ");
    }
    if (!i.elementary() || !j.elementary()) {
        throw Error(ErrorKind::NotElementary, "lemma: both projectors must have trace 1");
    }
    const CMatrix &a = i.components();
    const CMatrix &b = j.components();
    LemmaCheck out;
    out.premise_defect = (a * b * a - a).norm();
    out.conclusion_defect = (a - b).norm();
    out.premise = out.premise_defect <= tol.lemma;
    if (out.premise && out.conclusion_defect > tol.lemma + std::sqrt(2.0 * out.premise_defect) * (1.0 + 1e-6)) {
        throw Error(ErrorKind::VerificationFailure, "IJI = I holds but |I - J| = " + std::to_string(out.conclusion_defect));
    }
    return out;
}

}  // namespace pobs
