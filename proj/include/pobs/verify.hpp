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
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "json.hpp"
#include "pobs/measurement.hpp"
#include "pobs/random.hpp"
#include "pobs/states.hpp"

namespace pobs {

/// A randomized invariant. `check` draws one instance of dimension d and
/// returns its defect; the trial passes when the defect is at most
/// `tolerance` times the run's tolerance scale.
struct Property {
    std::string name;
    double tolerance;
    std::function<double(Rng &, std::size_t)> check;
};

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double rel(double err, double magnitude) {
    return err / std::max(1.0, magnitude);
}

inline Eigen::Index ix(std::size_t i) {
    return static_cast<Eigen::Index>(i);
}

/// Commuting family sharing one eigenbasis; eigenvalues come from a small set
/// so joint degeneracies occur.
inline std::vector<Observable> commuting_family(std::size_t d, std::size_t count, Rng &rng) {
    const CMatrix u = random_unitary(d, rng).components();
    std::vector<Observable> out;
    for (std::size_t a = 0; a < count; ++a) {
        Eigen::VectorXcd diag(ix(d));
        for (Eigen::Index i = 0; i < diag.size(); ++i) {
            diag[i] = static_cast<double>(rng.below(3)) - 1.0 + (rng.below(2) == 0 ? 0.0 : rng.normal());
        }
        CMatrix m = u * diag.asDiagonal() * u.adjoint();
        out.emplace_back(PseudoObservable(CMatrix((m + m.adjoint()) * 0.5)));
    }
    return out;
}

inline StateVectorSet random_set(std::size_t d, Rng &rng) {
    return make_state_vectors(DyadBasis(random_basis(d, rng)), rng.below(d), random_unitary(d, rng));
}

inline DensityObservable random_density(std::size_t d, Rng &rng) {
    return make_density(random_basis(d, rng), random_probabilities(d, rng));
}

/// Random normalized element of the span of a state-vector set.
inline PseudoObservable random_element(const StateVectorSet &s, Rng &rng) {
    CMatrix m = CMatrix::Zero(ix(s.dim()), ix(s.dim()));
    for (std::size_t j = 0; j < s.dim(); ++j) {
        m += rng.complex_normal() * s.member(j).components();
    }
    return PseudoObservable(CMatrix(m / m.norm()));
}

}  // namespace detail

/// Every module invariant plus the elementary-projector lemma fuzz.
inline std::vector<Property> all_properties() {
    using namespace detail;
    std::vector<Property> p;

    // algebra
    p.push_back({"algebra.associativity", 1e-12, [](Rng &r, std::size_t d) {
                     const auto a = random_pseudo(d, r), b = random_pseudo(d, r), c = random_pseudo(d, r);
                     const PseudoObservable lhs = (a * b) * c;
                     return rel(distance(lhs, a * (b * c)), max_abs(lhs.components()));
                 }});
    p.push_back({"algebra.distributivity", 1e-12, [](Rng &r, std::size_t d) {
                     const auto a = random_pseudo(d, r), b = random_pseudo(d, r), c = random_pseudo(d, r);
                     const PseudoObservable lhs = a * (b + c);
                     const PseudoObservable rhs = (b + c) * a;
                     return std::max(rel(distance(lhs, a * b + a * c), max_abs(lhs.components())),
                                     rel(distance(rhs, b * a + c * a), max_abs(rhs.components())));
                 }});
    p.push_back({"algebra.dagger_anti_automorphism", 1e-12, [](Rng &r, std::size_t d) {
                     const auto a = random_pseudo(d, r), b = random_pseudo(d, r);
                     const PseudoObservable ab = a * b;
                     return std::max(rel(distance(dagger(ab), dagger(b) * dagger(a)), max_abs(ab.components())),
                                     distance(dagger(dagger(a)), a));
                 }});
    p.push_back({"algebra.real_imag_recombine", 1e-13, [](Rng &r, std::size_t d) {
                     const auto z = random_pseudo(d, r);
                     auto [re, im] = real_imag_parts(z);
                     return distance(re.value() + Complex(0.0, 1.0) * im.value(), z);
                 }});

    // bases
    p.push_back({"bases.projector_resolution", 1e-10, [](Rng &r, std::size_t d) {
                     const ProjectorBasis b = random_basis(d, r);
                     double worst = 0.0;
                     CMatrix sum = CMatrix::Zero(ix(d), ix(d));
                     for (std::size_t j = 0; j < d; ++j) {
                         sum += b.projector(j).components();
                         for (std::size_t k = 0; k < d; ++k) {
                             const PseudoObservable want = j == k ? b.projector(j) : PseudoObservable::zero(d);
                             worst = std::max(worst, distance(b.projector(j) * b.projector(k), want));
                         }
                     }
                     return std::max(worst, max_abs(sum - CMatrix::Identity(ix(d), ix(d))));
                 }});
    p.push_back({"bases.component_reconstruction", 1e-10, [](Rng &r, std::size_t d) {
                     const PseudoObservable z = random_pseudo(d, r);
                     const DyadBasis b(random_basis(d, r));
                     const PseudoObservable back = from_components(components_in(z, b), b);
                     return rel(distance(back, z), max_abs(z.components()));
                 }});
    p.push_back({"bases.basis_change_composition", 1e-9, [](Rng &r, std::size_t d) {
                     const DyadBasis a(random_basis(d, r)), b(random_basis(d, r)), c(random_basis(d, r));
                     const BasisChange ac = compose(basis_change(a, b), basis_change(b, c));
                     double worst = distance(ac.omega(), basis_change(a, c).omega());
                     const std::size_t j = r.below(d), k = r.below(d);
                     return std::max(worst, distance(ac.conjugate(a.dyad(j, k)), c.dyad(j, k)));
                 }});
    p.push_back({"bases.compatible_basis_reconstruction", 1e-8, [](Rng &r, std::size_t d) {
                     const auto family = commuting_family(d, 1 + r.below(3), r);
                     const CompatibleBasis cb = complete_compatible_basis(family);
                     double worst = 0.0;
                     for (std::size_t a = 0; a < family.size(); ++a) {
                         CMatrix rec = CMatrix::Zero(ix(d), ix(d));
                         for (std::size_t j = 0; j < d; ++j) {
                             rec += cb.labels[j][a] * cb.basis.projector(j).components();
                         }
                         worst = std::max(worst, max_abs(rec - family[a].components()));
                     }
                     return worst;
                 }});

    // spectral
    p.push_back({"spectral.reconstruction", 1e-9, [](Rng &r, std::size_t d) {
                     const Observable o = random_observable(d, r);
                     return rel(distance(decompose(o).reassemble(), o.value()), max_abs(o.components()));
                 }});
    p.push_back({"spectral.dyad_eigenvector_equations", 1e-9, [](Rng &r, std::size_t d) {
                     const Observable o = random_observable(d, r);
                     const SpectralDecomposition sd = decompose(o);
                     const DyadBasis g(sd.basis);
                     double worst = 0.0;
                     for (std::size_t j = 0; j < d; ++j) {
                         for (std::size_t k = 0; k < d; ++k) {
                             const PseudoObservable gjk = g.dyad(j, k);
                             worst = std::max(worst, distance(o.value() * gjk, sd.coefficients[j] * gjk));
                             worst = std::max(worst, distance(gjk * o.value(), sd.coefficients[k] * gjk));
                         }
                     }
                     return rel(worst, max_abs(o.components()));
                 }});
    p.push_back({"spectral.conjugation_invariance", 1e-9, [](Rng &r, std::size_t d) {
                     const Observable o = random_observable(d, r);
                     const PseudoObservable u = random_unitary(d, r);
                     const Observable c(PseudoObservable(CMatrix(u.components() * o.components() * u.components().adjoint())));
                     const auto a = decompose(o).coefficients;
                     const auto b = decompose(c).coefficients;
                     double worst = 0.0;
                     for (std::size_t j = 0; j < d; ++j) {
                         worst = std::max(worst, std::abs(a[j] - b[j]));
                     }
                     return rel(worst, max_abs(o.components()));
                 }});
    p.push_back({"trace.linearity", 1e-10, [](Rng &r, std::size_t d) {
                     const auto x = random_pseudo(d, r), y = random_pseudo(d, r);
                     const Complex g = r.complex_normal();
                     const Complex lhs = trace(x + g * y);
                     return rel(std::abs(lhs - trace(x) - g * trace(y)), std::abs(lhs));
                 }});
    p.push_back({"trace.cyclicity", 1e-10, [](Rng &r, std::size_t d) {
                     const auto x = random_pseudo(d, r), y = random_pseudo(d, r);
                     const Complex a = trace(x * y);
                     return rel(std::abs(a - trace(y * x)), std::abs(a));
                 }});
    p.push_back({"trace.commutator", 1e-10, [](Rng &r, std::size_t d) {
                     const auto x = random_pseudo(d, r), y = random_pseudo(d, r);
                     return rel(std::abs(trace(commutator(x, y))), max_abs((x * y).components()));
                 }});
    p.push_back({"trace.adjoint", 1e-10, [](Rng &r, std::size_t d) {
                     const auto z = random_pseudo(d, r);
                     return std::abs(trace(dagger(z)) - std::conj(trace(z)));
                 }});
    p.push_back({"trace.basis_independence", 1e-10, [](Rng &r, std::size_t d) {
                     const auto z = random_pseudo(d, r);
                     const DyadBasis b(random_basis(d, r));
                     Complex s{};
                     for (std::size_t j = 0; j < d; ++j) {
                         s += component(z, j, j, b);
                     }
                     const Complex t = trace(z);
                     return rel(std::abs(s - t), std::abs(t));
                 }});
    p.push_back({"inner.axioms", 1e-10, [](Rng &r, std::size_t d) {
                     const auto x = random_pseudo(d, r), y = random_pseudo(d, r), z = random_pseudo(d, r);
                     const Complex a = r.complex_normal(), b = r.complex_normal();
                     const Complex xy = inner(x, y);
                     double worst = std::abs(xy - std::conj(inner(y, x)));
                     const Complex lin = inner(x, a * y + b * z);
                     worst = std::max(worst, rel(std::abs(lin - a * xy - b * inner(x, z)), std::abs(lin)));
                     const Complex anti = inner(a * y + b * z, x);
                     worst = std::max(worst, rel(std::abs(anti - std::conj(a) * inner(y, x) - std::conj(b) * inner(z, x)),
                                                 std::abs(anti)));
                     const Complex xx = inner(x, x);
                     worst = std::max(worst, std::abs(xx.imag()));
                     // Definiteness: max |x_ij| <= |x|, and |0| = 0.
                     const double m = max_abs(x.components());
                     worst = std::max(worst, std::max(0.0, m * m - xx.real()));
                     worst = std::max(worst, norm(PseudoObservable::zero(d)));
                     return worst;
                 }});
    p.push_back({"inner.transpose_and_adjoint", 1e-10, [](Rng &r, std::size_t d) {
                     const auto x = random_pseudo(d, r), y = random_pseudo(d, r), z = random_pseudo(d, r);
                     const Complex xy = inner(x, y);
                     const Complex xyz = inner(x, y * z);
                     return std::max(rel(std::abs(xy - inner(dagger(y), dagger(x))), std::abs(xy)),
                                     rel(std::abs(xyz - inner(dagger(y) * x, z)), std::abs(xyz)));
                 }});
    p.push_back({"inner.dyad_orthonormality", 1e-10, [](Rng &r, std::size_t d) {
                     const DyadBasis b(random_basis(d, r));
                     CMatrix cols(ix(d * d), ix(d * d));
                     for (std::size_t j = 0; j < d; ++j) {
                         for (std::size_t k = 0; k < d; ++k) {
                             const CMatrix g = b.dyad(j, k).components();
                             cols.col(ix(j * d + k)) = Eigen::Map<const CVector>(g.data(), g.size());
                         }
                     }
                     const CMatrix gram = cols.adjoint() * cols;
                     return max_abs(gram - CMatrix::Identity(gram.rows(), gram.cols()));
                 }});
    p.push_back({"inner.cauchy_schwarz", 1e-12, [](Rng &r, std::size_t d) {
                     const auto x = random_pseudo(d, r), y = random_pseudo(d, r);
                     const double bound = norm(x) * norm(y);
                     return rel(std::max(0.0, std::abs(inner(x, y)) - bound), bound);
                 }});

    // states
    p.push_back({"states.set_invariants", 1e-9, [](Rng &r, std::size_t d) {
                     const StateVectorSet s = random_set(d, r);
                     double worst = s.invariant_defect();
                     const PseudoObservable j0 = dagger(s.member(0)) * s.member(0);
                     worst = std::max(worst, std::abs(trace(j0) - 1.0));
                     for (std::size_t j = 0; j < d; ++j) {
                         const PseudoObservable psi = s.member(j);
                         worst = std::max(worst, distance(dagger(psi) * psi, j0));
                         worst = std::max(worst, distance(psi * j0, psi));
                         worst = std::max(worst, distance(s.basis().projector(j) * psi, psi));
                     }
                     return worst;
                 }});
    p.push_back({"states.characterization_roundtrip", 1e-9, [](Rng &r, std::size_t d) {
                     const StateVectorSet s = random_set(d, r);
                     const Characterization c = verify_characterization(s.members(), s.basis(), s.k0());
                     if (!c.holds || !c.factorization) {
                         return kInf;
                     }
                     double worst = 0.0;
                     for (std::size_t j = 0; j < d; ++j) {
                         worst = std::max(worst, distance(c.factorization->member(j), s.member(j)));
                     }
                     // A scaled member must be rejected.
                     auto bad = s.members();
                     bad[r.below(d)] = 2.0 * bad[0];
                     return verify_characterization(bad, s.basis()).holds ? kInf : worst;
                 }});
    p.push_back({"states.anchor_irrelevance", 1e-9, [](Rng &r, std::size_t d) {
                     const StateVectorSet s = random_set(d, r);
                     const std::size_t k1 = r.below(d);
                     const StateVectorSet t(s.basis(), k1, exchange_unitary(s.basis(), k1, s.k0()) * s.k());
                     double worst = 0.0;
                     for (std::size_t j = 0; j < d; ++j) {
                         worst = std::max(worst, distance(t.member(j), s.member(j)));
                     }
                     return worst;
                 }});
    p.push_back({"states.equivalence_closure", 1e-9, [](Rng &r, std::size_t d) {
                     const StateVectorSet s = random_set(d, r);
                     std::vector<double> a(d), b(d), sum(d);
                     for (std::size_t j = 0; j < d; ++j) {
                         a[j] = 6.0 * r.uniform();
                         b[j] = 6.0 * r.uniform();
                         sum[j] = a[j] + b[j];
                     }
                     const PseudoObservable y1 = random_unitary(d, r), y2 = random_unitary(d, r);
                     const StateVectorSet mid = equivalent_set(s, a, y1);
                     const StateVectorSet twice = equivalent_set(mid, b, y2);
                     const StateVectorSet once = equivalent_set(s, sum, y1 * y2);
                     double worst = std::max(mid.invariant_defect(), twice.invariant_defect());
                     for (std::size_t j = 0; j < d; ++j) {
                         worst = std::max(worst, distance(twice.member(j), once.member(j)));
                     }
                     if (!equivalence_witness(s, twice) || !equivalence_witness(twice, s)) {
                         return kInf;
                     }
                     return worst;
                 }});
    p.push_back({"states.eigenstate_space_change", 1e-9, [](Rng &r, std::size_t d) {
                     const StateVectorSet s = random_set(d, r);
                     const CMatrix w = random_unitary(d, r).components();
                     std::vector<PseudoObservable> phis;
                     for (std::size_t j = 0; j < d; ++j) {
                         CMatrix m = CMatrix::Zero(ix(d), ix(d));
                         for (std::size_t k = 0; k < d; ++k) {
                             m += w(ix(k), ix(j)) * s.member(k).components();
                         }
                         phis.emplace_back(std::move(m));
                     }
                     auto [set, change] = orthonormal_basis_to_eigenstate_set(phis, s);
                     const CMatrix &om = change.omega().components();
                     double worst = max_abs(om * om.adjoint() - CMatrix::Identity(ix(d), ix(d)));
                     worst = std::max(worst, set.invariant_defect());
                     for (std::size_t j = 0; j < d; ++j) {
                         worst = std::max(worst, distance(set.member(j), phis[j]));
                         const std::size_t k = r.below(d);
                         worst = std::max(worst, distance(change.conjugate(s.basis().dyad(j, k)), phis[j] * dagger(phis[k])));
                     }
                     return worst;
                 }});
    p.push_back({"states.superposition", 1e-9, [](Rng &r, std::size_t d) {
                     const StateVectorSet s = random_set(d, r);
                     const PseudoObservable phi = random_element(s, r);
                     std::vector<PseudoObservable> basis{phi};
                     for (std::size_t j = 0; j < d && basis.size() < d; ++j) {
                         auto trial = basis;
                         trial.push_back(s.member(j));
                         try {
                             basis = gram_schmidt(trial);
                         } catch (const Error &) {
                         }
                     }
                     if (basis.size() != d) {
                         return kInf;
                     }
                     auto [set, change] = orthonormal_basis_to_eigenstate_set(basis, s);
                     return std::max({distance(set.member(0), phi), set.invariant_defect(),
                                      verify_characterization(set.members(), set.basis(), set.k0()).defect});
                 }});
    p.push_back({"states.wave_function_parseval", 1e-10, [](Rng &r, std::size_t d) {
                     const StateVectorSet s = random_set(d, r);
                     const PseudoObservable a = random_element(s, r), b = random_element(s, r);
                     const WaveFunction wa = wave_function(a, s), wb = wave_function(b, s);
                     double total = 0.0;
                     for (double q : wa.probabilities()) {
                         total += q;
                     }
                     return std::max({std::abs(inner(a, b) - inner(wa, wb)), std::abs(total - 1.0)});
                 }});

    // measurement
    p.push_back({"measurement.consistency_identity", 1e-10, [](Rng &r, std::size_t d) {
                     const Observable b = random_observable(d, r);
                     return rel(conditional_expectation_routes(b, random_density(d, r)).spread(), max_abs(b.components()));
                 }});
    p.push_back({"measurement.project_density_idempotent", 1e-10, [](Rng &r, std::size_t d) {
                     const ProjectorBasis b = random_basis(d, r);
                     const DensityObservable once = project_density(random_density(d, r), b);
                     return distance(once.matrix(), project_density(once, b).matrix());
                 }});
    p.push_back({"measurement.transition_doubly_stochastic", 1e-10, [](Rng &r, std::size_t d) {
                     const TransitionMatrix t = transition_matrix(random_basis(d, r), random_basis(d, r));
                     return std::max({t.stochastic_defect(), std::max(0.0, -t.entries.minCoeff()),
                                      std::max(0.0, t.entries.maxCoeff() - 1.0)});
                 }});
    p.push_back({"measurement.transition_transpose", 1e-12, [](Rng &r, std::size_t d) {
                     const ProjectorBasis a = random_basis(d, r), b = random_basis(d, r);
                     return (transition_matrix(a, b).entries - transition_matrix(b, a).entries.transpose())
                         .cwiseAbs()
                         .maxCoeff();
                 }});
    p.push_back({"measurement.expectation_linearity", 1e-12, [](Rng &r, std::size_t d) {
                     const DensityObservable dens = random_density(d, r);
                     const auto z1 = random_pseudo(d, r), z2 = random_pseudo(d, r);
                     const Complex g = r.complex_normal();
                     const Complex lhs = expectation(z1 + g * z2, dens);
                     const Complex rhs = expectation(z1, dens) + g * expectation(z2, dens);
                     const double adj = std::abs(expectation(dagger(z1), dens) - std::conj(expectation(z1, dens)));
                     const double one = std::abs(expectation(PseudoObservable::identity(d), dens) - 1.0);
                     return std::max({rel(std::abs(lhs - rhs), std::abs(lhs)), adj, one});
                 }});
    p.push_back({"measurement.order_preservation", 1e-12, [](Rng &r, std::size_t d) {
                     const DensityObservable dens = random_density(d, r);
                     const Observable o = random_observable(d, r);
                     const PseudoObservable g = random_pseudo(d, r);
                     const CMatrix q = (g.components().adjoint() * g.components()).eval();
                     const Observable oq(PseudoObservable(CMatrix(o.components() + 0.5 * (q + q.adjoint()))));
                     if (!loewner_leq(o, oq)) {
                         return kInf;
                     }
                     const double lo = expectation(o, dens).real();
                     return rel(std::max(0.0, lo - expectation(oq, dens).real()), std::abs(lo));
                 }});
    p.push_back({"measurement.uncertainty", 1e-10, [](Rng &r, std::size_t d) {
                     const Observable a = random_observable(d, r), b = random_observable(d, r);
                     const UncertaintyCheck u = uncertainty_check(a, b, random_density(d, r));
                     return std::max(0.0, u.rhs - u.lhs);
                 }});
    p.push_back({"measurement.deviation_commutator", 1e-10, [](Rng &r, std::size_t d) {
                     const Observable a = random_observable(d, r), b = random_observable(d, r);
                     const UncertaintyCheck u = uncertainty_check(a, b, random_density(d, r));
                     return rel(u.commutator_defect, max_abs(a.components()) * max_abs(b.components()));
                 }});
    p.push_back({"measurement.born_normalization", 1e-10, [](Rng &r, std::size_t d) {
                     const auto family = commuting_family(d, 1, r);
                     const CompatibleBasis cb = complete_compatible_basis(family);
                     const StateVectorSet s = make_state_vectors(DyadBasis(cb.basis), r.below(d), random_unitary(d, r));
                     const PseudoObservable phi = random_element(s, r);
                     double total = 0.0;
                     for (const auto &x : born_distribution(phi, s, family[0])) {
                         total += x.probability;
                     }
                     double worst = std::abs(total - 1.0);
                     const WaveFunction wf = wave_function(phi, s);
                     for (std::size_t j = 0; j < d; ++j) {
                         worst = std::max(worst, std::abs(std::norm(wf.amplitudes[j]) - std::norm(inner(phi, s.member(j)))));
                     }
                     return worst;
                 }});
    p.push_back({"measurement.null_expectation", 1e-10, [](Rng &r, std::size_t d) {
                     const Observable o = random_observable(d, r);
                     const SpectralDecomposition sd = decompose(o);
                     double worst = 0.0;
                     for (std::size_t j = 0; j < d; ++j) {
                         worst = std::max(worst, std::abs(expectation(o, pure_density(sd.basis, j)).real() - sd.coefficients[j]));
                     }
                     return rel(worst, max_abs(o.components()));
                 }});
    p.push_back({"measurement.matrix_elements", 1e-10, [](Rng &r, std::size_t d) {
                     const StateVectorSet s = random_set(d, r);
                     const PseudoObservable z = random_pseudo(d, r);
                     const std::size_t j = r.below(d), k = r.below(d);
                     return rel(std::abs(matrix_element(z, s, j, k) - component(z, j, k, s.basis())), max_abs(z.components()));
                 }});

    // Elementary-projector lemma: whenever |IJI - I| <= 1e-9, |I - J| <= 1e-8.
    // Every tenth trial uses a constructed equal pair so the premise fires.
    p.push_back({"lemma.elementary_equality", 1e-8, [](Rng &r, std::size_t d) {
                     const CVector v = random_unit_vector(d, r);
                     const Projector i = Projector::from_vector(v);
                     const bool equal = r.below(10) == 0;
                     const Projector j = equal ? Projector::from_vector(std::polar(1.0, 6.0 * r.uniform()) * v)
                                               : Projector::from_vector(random_unit_vector(d, r));
                     const LemmaCheck c = lemma_elementary_equality(i, j);
                     if (equal && !c.premise) {
                         return kInf;
                     }
                     return c.premise ? c.conclusion_defect : 0.0;
                 }});
    return p;
}

struct OffendingTrial {
    std::uint64_t seed;
    std::size_t dim;
    double error;
    std::string message;
};

struct PropertyResult {
    std::string name;
    double tolerance = 0.0;
    std::size_t trials = 0;
    std::size_t failures = 0;
    double worst_error = 0.0;
    std::size_t worst_dim = 0;
    std::vector<OffendingTrial> offending;  // first few failures

    [[nodiscard]] bool passed() const noexcept {
        return failures == 0;
    }
};

inline constexpr std::size_t kMaxOffending = 5;

/// Seed of trial t of property number `index`: reruns of one trial only need
/// this seed and the dimension.
inline std::uint64_t trial_seed(std::uint64_t root, std::size_t index, std::size_t t) {
    return derive_seed(derive_seed(root, index), t);
}

/// Runs `trials` instances, cycling through `dims`.
inline PropertyResult run_property(const Property &prop, std::size_t index, const std::vector<std::size_t> &dims,
                                   std::size_t trials, std::uint64_t seed, double tol_scale) {
    PropertyResult out;
    out.name = prop.name;
    out.tolerance = prop.tolerance * tol_scale;
    out.trials = trials;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::uint64_t s = trial_seed(seed, index, t);
        const std::size_t d = dims[t % dims.size()];
        Rng rng(s);
        double err = 0.0;
        std::string message;
        try {
            err = prop.check(rng, d);
        } catch (const std::exception &e) {
            err = detail::kInf;
            message = e.what();
        }
        if (std::isnan(err)) {
            err = detail::kInf;
        }
        if (err > out.worst_error || t == 0) {
            out.worst_error = err;
            out.worst_dim = d;
        }
        if (!(err <= out.tolerance)) {
            ++out.failures;
            if (out.offending.size() < kMaxOffending) {
                out.offending.push_back({s, d, err, message});
            }
        }
    }
    return out;
}

struct VerifyOptions {
    std::size_t dim_lo = 2;
    std::size_t dim_hi = 12;
    std::size_t trials = 1000;
    std::uint64_t seed = 42;
    double tol_scale = 1.0;
};

struct VerificationReport {
    VerifyOptions options;
    std::vector<PropertyResult> results;

    [[nodiscard]] bool passed() const {
        return std::all_of(results.begin(), results.end(), [](const auto &r) { return r.passed(); });
    }
};

inline VerificationReport verify(const VerifyOptions &opt) {
    if (opt.dim_lo < 1 || opt.dim_hi < opt.dim_lo || opt.dim_hi > 64) {
        throw Error(ErrorKind::ValidationError, "dims must satisfy 1 <= lo <= hi <= 64");
    }
    if (!(opt.tol_scale >= 0.0) || !std::isfinite(opt.tol_scale)) {
        throw Error(ErrorKind::ValidationError, "tol-scale must be finite and non-negative");
    }
    std::vector<std::size_t> dims;
    for (std::size_t d = opt.dim_lo; d <= opt.dim_hi; ++d) {
        dims.push_back(d);
    }
    VerificationReport rep{opt, {}};
    const auto props = all_properties();
    for (std::size_t i = 0; i < props.size(); ++i) {
        rep.results.push_back(run_property(props[i], i, dims, opt.trials, opt.seed, opt.tol_scale));
    }
    return rep;
}

namespace detail {

inline nlohmann::ordered_json number(double x) {
    if (std::isfinite(x)) {
        return x;
    }
    return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const VerificationReport &rep) {
    nlohmann::ordered_json j;
    j["report"] = "pobs verify";
    j["seed"] = rep.options.seed;
    j["dims"] = {rep.options.dim_lo, rep.options.dim_hi};
    j["trials"] = rep.options.trials;
    j["tol_scale"] = rep.options.tol_scale;
    j["passed"] = rep.passed();
    std::size_t failing = 0;
    nlohmann::ordered_json props = nlohmann::ordered_json::array();
    for (const PropertyResult &r : rep.results) {
        failing += r.passed() ? 0 : 1;
        nlohmann::ordered_json p;
        p["name"] = r.name;
        p["passed"] = r.passed();
        p["tolerance"] = r.tolerance;
        p["worst_error"] = detail::number(r.worst_error);
        p["worst_dim"] = r.worst_dim;
        p["trials"] = r.trials;
        p["failures"] = r.failures;
        nlohmann::ordered_json off = nlohmann::ordered_json::array();
        for (const OffendingTrial &o : r.offending) {
            nlohmann::ordered_json e;
            e["seed"] = o.seed;
            e["dim"] = o.dim;
            e["error"] = detail::number(o.error);
            if (!o.message.empty()) {
                e["message"] = o.message;
            }
            off.push_back(std::move(e));
        }
        p["offending"] = std::move(off);
        props.push_back(std::move(p));
    }
    j["failing_properties"] = failing;
    j["properties"] = std::move(props);
    return j;
}

}  // namespace pobs
