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

#include "pobs/bases.hpp"

#include "gtest/gtest.h"
#include "test_util.hpp"

using namespace pobs;
using namespace pobs::testing;

TEST(bases, make_basis) {
    const ProjectorBasis comp = make_basis({vec({1, 0}), vec({0, 1})});
    EXPECT_EQ(distance(comp.projector(0), po({{1, 0}, {0, 0}})), 0.0);

    // Gram matrix oracle for the Hadamard pair: entries 1/2 + 1/2 and 1/2 - 1/2.
    const ProjectorBasis h = hadamard_basis();
    const double s = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(s * s + s * s - 1.0), 0.0, 1e-15);
    EXPECT_LE(distance(h.projector(0), po({{0.5, 0.5}, {0.5, 0.5}})), 1e-15);

    try {
        make_basis({vec({1, 0}), vec({1, 0})});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotOrthonormal);
    }
    try {
        make_basis({vec({1, 0, 0}), vec({0, 1})});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
}

TEST(bases, component_examples) {
    Rng rng(4);
    const DyadBasis b(random_basis(3, rng));
    for (std::size_t j = 0; j < 3; ++j) {
        for (std::size_t k = 0; k < 3; ++k) {
            for (std::size_t j2 = 0; j2 < 3; ++j2) {
                for (std::size_t k2 = 0; k2 < 3; ++k2) {
                    const Complex c = component(b.dyad(j, k), j2, k2, b);
                    EXPECT_LE(std::abs(c - Complex(j == j2 && k == k2 ? 1.0 : 0.0)), 1e-12);
                }
            }
        }
    }
    EXPECT_THROW(component(b.dyad(0, 0), 3, 0, b), Error);
}

TEST(bases, component_reconstruction) {
    // Oracle: component = trace(Gamma_kj P) computed by naive loops, then
    // P_rec = sum component * Gamma_jk.
    Rng rng(5);
    for (std::size_t d : {1u, 2u, 4u, 7u}) {
        const PseudoObservable p = random_pseudo(d, rng);
        const DyadBasis b(random_basis(d, rng));
        CMatrix rec = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        for (std::size_t j = 0; j < d; ++j) {
            for (std::size_t k = 0; k < d; ++k) {
                const Complex c = component(p, j, k, b);
                const Complex oracle =
                    naive_trace(naive_mul(to_grid(b.dyad(k, j).components()), to_grid(p.components())));
                EXPECT_LE(std::abs(c - oracle), 1e-12);
                rec += c * b.dyad(j, k).components();
            }
        }
        EXPECT_LE(max_abs(rec - p.components()), 1e-10);
    }
}

TEST(bases, basis_change_examples) {
    const DyadBasis comp(ProjectorBasis::computational(2));
    const DyadBasis had(hadamard_basis());
    EXPECT_LE(distance(basis_change(comp, comp).omega(), PseudoObservable::identity(2)), 1e-15);

    const BasisChange c = basis_change(comp, had);
    const double s = 1.0 / std::sqrt(2.0);
    EXPECT_LE(distance(c.omega(), po({{s, s}, {s, -s}})), 1e-15);
    EXPECT_LE(distance(c.conjugate(comp.dyad(0, 1)), had.dyad(0, 1)), 1e-15);

    Rng rng(6);
    const DyadBasis a(random_basis(4, rng));
    const DyadBasis b(random_basis(4, rng));
    const DyadBasis cc(random_basis(4, rng));
    const BasisChange ac = compose(basis_change(a, b), basis_change(b, cc));
    EXPECT_LE(distance(ac.omega(), basis_change(a, cc).omega()), 1e-9);
    for (std::size_t j = 0; j < 4; ++j) {
        for (std::size_t k = 0; k < 4; ++k) {
            EXPECT_LE(distance(ac.conjugate(a.dyad(j, k)), cc.dyad(j, k)), 1e-12);
        }
    }
    EXPECT_THROW(basis_change(comp, DyadBasis(ProjectorBasis::computational(3))), Error);
}

TEST(bases, exchange_unitary) {
    Rng rng(8);
    const DyadBasis b(random_basis(4, rng));
    const PseudoObservable s = exchange_unitary(b, 1, 3);
    EXPECT_TRUE(is_unitary(s));
    for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_LE(distance(b.dyad(j, 1) * s, b.dyad(j, 3)), 1e-12);
    }
}

TEST(bases, complete_compatible_basis_examples) {
    const CompatibleBasis z = complete_compatible_basis({Observable(pauli_z())});
    EXPECT_LE(max_abs(z.basis.vectors() - CMatrix::Identity(2, 2)), 1e-15);
    EXPECT_DOUBLE_EQ(z.labels[0][0], 1.0);
    EXPECT_DOUBLE_EQ(z.labels[1][0], -1.0);

    // Eigen-decomposition oracle for X: eigenvalues +-1, eigenvectors (1, +-1)/sqrt 2.
    const CompatibleBasis x = complete_compatible_basis({Observable(pauli_x())});
    EXPECT_LE(max_abs(x.basis.vectors() - hadamard_basis().vectors()), 1e-12);
    EXPECT_NEAR(x.labels[0][0], 1.0, 1e-12);
    EXPECT_NEAR(x.labels[1][0], -1.0, 1e-12);

    try {
        complete_compatible_basis({Observable(pauli_z()), Observable(pauli_x())});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotCommuting);
    }
    EXPECT_THROW(complete_compatible_basis({}), Error);
}

TEST(bases, complete_compatible_basis_resolves_degeneracy_jointly) {
    // diag(1,1,0) alone leaves a 2-d eigenspace; adding diag(0,5,5) splits it.
    const Observable a(mat({{1, 0, 0}, {0, 1, 0}, {0, 0, 0}}));
    const Observable b(mat({{0, 0, 0}, {0, 5, 0}, {0, 0, 5}}));
    const CompatibleBasis cb = complete_compatible_basis({a, b});
    ASSERT_EQ(cb.labels.size(), 3u);
    EXPECT_NEAR(cb.labels[0][0], 1, 1e-12);
    EXPECT_NEAR(cb.labels[0][1], 5, 1e-12);
    EXPECT_NEAR(cb.labels[1][0], 1, 1e-12);
    EXPECT_NEAR(cb.labels[1][1], 0, 1e-12);
    EXPECT_NEAR(cb.labels[2][0], 0, 1e-12);
    EXPECT_NEAR(cb.labels[2][1], 5, 1e-12);
    EXPECT_LE(max_abs(cb.basis.vectors() - mat({{0, 1, 0}, {1, 0, 0}, {0, 0, 1}})), 1e-12);
}

TEST(bases_properties, projector_basis_exclusivity_and_closure) {
    Rng rng(10);
    for (int t = 0; t < 100; ++t) {
        const std::size_t d = 1 + rng.below(8);
        const ProjectorBasis b = random_basis(d, rng);
        CMatrix sum = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        for (std::size_t j = 0; j < d; ++j) {
            sum += b.projector(j).components();
            EXPECT_NEAR(b.projector(j).components().trace().real(), 1.0, 1e-12);
            for (std::size_t k = 0; k < d; ++k) {
                const PseudoObservable want = j == k ? b.projector(j) : PseudoObservable::zero(d);
                EXPECT_LE(distance(b.projector(j) * b.projector(k), want), 1e-10);
            }
        }
        EXPECT_LE(max_abs(sum - CMatrix::Identity(sum.rows(), sum.cols())), 1e-10);
    }
}

TEST(bases_properties, closure_under_unitary_conjugation) {
    Rng rng(12);
    for (int t = 0; t < 100; ++t) {
        const std::size_t d = 1 + rng.below(8);
        const DyadBasis b(random_basis(d, rng));
        EXPECT_NO_THROW(rotate(b, random_unitary(d, rng)));
    }
}

TEST(bases_properties, compatible_basis_reconstructs_family) {
    Rng rng(13);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t d = 1 + rng.below(10);
        const auto family = random_commuting_family(d, 1 + rng.below(3), rng);
        const CompatibleBasis cb = complete_compatible_basis(family);
        for (std::size_t a = 0; a < family.size(); ++a) {
            CMatrix rec = CMatrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
            for (std::size_t j = 0; j < d; ++j) {
                rec += cb.labels[j][a] * cb.basis.projector(j).components();
            }
            worst = std::max(worst, max_abs(rec - family[a].components()));
        }
    }
    EXPECT_LE(worst, 1e-8);
}
