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

#include "pobs/algebra.hpp"

#include <limits>

#include "gtest/gtest.h"
#include "test_util.hpp"

using namespace pobs;
using namespace pobs::testing;

namespace {
const Complex I(0.0, 1.0);
}

TEST(algebra, construction_rejects_bad_shapes) {
    EXPECT_THROW(PseudoObservable(CMatrix(2, 3)), Error);
    EXPECT_THROW(PseudoObservable(CMatrix(0, 0)), Error);
    CMatrix nan = CMatrix::Zero(2, 2);
    nan(0, 1) = std::numeric_limits<double>::quiet_NaN();
    try {
        PseudoObservable p(nan);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::NonFinite);
    }
}

TEST(algebra, add) {
    Rng rng(1);
    const PseudoObservable p = random_pseudo(3, rng);
    EXPECT_EQ(distance(add(p, PseudoObservable::zero(3)), p), 0.0);

    const DyadBasis comp(ProjectorBasis::computational(2));
    EXPECT_EQ(distance(comp.dyad(0, 0) + comp.dyad(1, 1), PseudoObservable::identity(2)), 0.0);

    EXPECT_EQ(distance(po({{0, 1}, {0, 0}}) + po({{0, 0}, {1, 0}}), po({{0, 1}, {1, 0}})), 0.0);

    try {
        add(PseudoObservable::zero(2), PseudoObservable::zero(3));
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    }
}

TEST(algebra, mul_dyad_products) {
    // Gamma_{jk} Gamma_{k'l} = delta_{kk'} Gamma_{jl}, d = 3, in a rotated basis too.
    Rng rng(7);
    for (const DyadBasis &b : {DyadBasis(ProjectorBasis::computational(3)), DyadBasis(random_basis(3, rng))}) {
        for (std::size_t j = 0; j < 3; ++j) {
            for (std::size_t k = 0; k < 3; ++k) {
                for (std::size_t k2 = 0; k2 < 3; ++k2) {
                    for (std::size_t l = 0; l < 3; ++l) {
                        const PseudoObservable got = mul(b.dyad(j, k), b.dyad(k2, l));
                        const PseudoObservable want = k == k2 ? b.dyad(j, l) : PseudoObservable::zero(3);
                        EXPECT_LE(distance(got, want), 1e-12);
                    }
                }
            }
        }
    }
}

TEST(algebra, mul_examples) {
    const ProjectorBasis comp = ProjectorBasis::computational(2);
    EXPECT_LE(distance(mul(comp.projector(1), comp.projector(1)), comp.projector(1)), 0.0);
    // Hand product: [[0,1],[1,0]] [[1,0],[0,-1]] = [[0,-1],[1,0]].
    EXPECT_EQ(distance(pauli_x() * pauli_z(), po({{0, -1}, {1, 0}})), 0.0);
    EXPECT_THROW(mul(PseudoObservable::zero(2), PseudoObservable::zero(3)), Error);
}

TEST(algebra, mul_matches_naive_oracle) {
    Rng rng(11);
    for (std::size_t d : {1u, 2u, 5u, 9u}) {
        const PseudoObservable p = random_pseudo(d, rng);
        const PseudoObservable q = random_pseudo(d, rng);
        const Grid want = naive_mul(to_grid(p.components()), to_grid(q.components()));
        EXPECT_LE(grid_distance(want, mul(p, q).components()), 1e-12);
    }
}

TEST(algebra, dagger) {
    Rng rng(3);
    const Observable o = random_observable(4, rng);
    EXPECT_EQ(distance(dagger(o), o), 0.0);

    const DyadBasis b(random_basis(3, rng));
    EXPECT_LE(distance(dagger(b.dyad(0, 2)), b.dyad(2, 0)), 1e-15);

    EXPECT_EQ(distance(dagger(po({{0, I}, {0, 0}})), po({{0, 0}, {-I, 0}})), 0.0);

    const PseudoObservable z = random_pseudo(5, rng);
    EXPECT_EQ(distance(dagger(dagger(z)), z), 0.0);
    EXPECT_LE(grid_distance(naive_adjoint(to_grid(z.components())), dagger(z).components()), 0.0);
}

TEST(algebra, real_imag_parts_examples) {
    Rng rng(5);
    const Observable o = random_observable(3, rng);
    auto [re, im] = real_imag_parts(o);
    EXPECT_LE(distance(re, o), 1e-15);
    EXPECT_LE(max_abs(im.components()), 1e-15);

    auto [re2, im2] = real_imag_parts(Complex(0, 1) * o.value());
    EXPECT_LE(max_abs(re2.components()), 1e-15);
    EXPECT_LE(distance(im2, o), 1e-15);

    // Oracle: (Z + Z^dagger) / 2 and (Z - Z^dagger) / (2i), entrywise by hand.
    // Z = [[0,1],[0,0]]: Z_R = [[0, 1/2],[1/2, 0]], Z_I = [[0, -i/2],[i/2, 0]].
    auto [re3, im3] = real_imag_parts(po({{0, 1}, {0, 0}}));
    EXPECT_LE(distance(re3, po({{0, 0.5}, {0.5, 0}})), 1e-15);
    EXPECT_LE(distance(im3, po({{0, -0.5 * I}, {0.5 * I, 0}})), 1e-15);
}

TEST(algebra, commutator_examples) {
    Rng rng(9);
    const PseudoObservable x = random_pseudo(4, rng);
    EXPECT_EQ(max_abs(commutator(x, x).components()), 0.0);
    EXPECT_EQ(distance(commutator(pauli_z(), pauli_x()), po({{0, 2}, {-2, 0}})), 0.0);
    const PseudoObservable y = random_pseudo(4, rng);
    EXPECT_LE(std::abs(commutator(x, y).components().trace()), 1e-12);
}

TEST(algebra, observable_and_projector_validation) {
    EXPECT_THROW(Observable(po({{0, 1}, {0, 0}})), Error);
    try {
        Projector(mat({{1, 0}, {0, 0.5}}));
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotIdempotent);
    }
    EXPECT_TRUE(Projector(mat({{1, 0}, {0, 0}})).elementary());
    EXPECT_FALSE(Projector(mat({{1, 0}, {0, 1}})).elementary());
    EXPECT_FALSE(Projector(mat({{0, 0}, {0, 0}})).elementary());
}

TEST(algebra, dimension_one) {
    const PseudoObservable c = PseudoObservable::constant(1, Complex(2.5, -1));
    const PseudoObservable d = PseudoObservable::constant(1, Complex(0.5, 3));
    EXPECT_EQ(mul(c, d)(0, 0), Complex(2.5, -1) * Complex(0.5, 3));
    EXPECT_EQ(max_abs(commutator(c, d).components()), 0.0);
    auto [re, im] = real_imag_parts(c);
    EXPECT_EQ(re.components()(0, 0), Complex(2.5, 0));
    EXPECT_EQ(im.components()(0, 0), Complex(-1, 0));
}

// Properties over random inputs.

TEST(algebra_properties, associativity_and_distributivity) {
    Rng rng(2024);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        const std::size_t d = 1 + rng.below(32);
        const PseudoObservable p = random_pseudo(d, rng);
        const PseudoObservable q = random_pseudo(d, rng);
        const PseudoObservable r = random_pseudo(d, rng);
        const PseudoObservable lhs = (p * q) * r;
        const double scale = max_abs(lhs.components()) + 1.0;
        worst = std::max(worst, distance(lhs, p * (q * r)) / scale);
        const PseudoObservable dl = p * (q + r);
        worst = std::max(worst, distance(dl, p * q + p * r) / (max_abs(dl.components()) + 1.0));
    }
    EXPECT_LE(worst, 1e-12);
}

TEST(algebra_properties, dagger_anti_automorphism) {
    Rng rng(77);
    for (int t = 0; t < 200; ++t) {
        const std::size_t d = 1 + rng.below(16);
        const PseudoObservable p = random_pseudo(d, rng);
        const PseudoObservable q = random_pseudo(d, rng);
        EXPECT_LE(distance(dagger(p * q), dagger(q) * dagger(p)), 1e-12);
        EXPECT_EQ(distance(dagger(dagger(p)), p), 0.0);
    }
}

TEST(algebra_properties, real_imag_recombine) {
    Rng rng(78);
    for (int t = 0; t < 200; ++t) {
        const std::size_t d = 1 + rng.below(16);
        const PseudoObservable z = random_pseudo(d, rng);
        auto [re, im] = real_imag_parts(z);
        EXPECT_LE(distance(re.value() + Complex(0, 1) * im.value(), z), 1e-14);
        EXPECT_TRUE(is_hermitian(re.value()));
        EXPECT_TRUE(is_hermitian(im.value()));
    }
}

TEST(algebra_properties, commutator_traceless) {
    Rng rng(79);
    double worst = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t d = 2 + rng.below(15);
        worst = std::max(worst, std::abs(commutator(random_pseudo(d, rng), random_pseudo(d, rng)).components().trace()));
    }
    EXPECT_LE(worst, 1e-11);
}
