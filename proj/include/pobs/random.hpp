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
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/QR>

#include "pobs/algebra.hpp"
#include "pobs/bases.hpp"

namespace pobs {

/// SplitMix64 finalizer; derives independent stream seeds from a root seed.
inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) {
    std::uint64_t z = root + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Seedable generator with output that is identical across platforms.
///
/// The engine is std::mt19937_64, whose sequence the standard pins down.
/// Uniform and normal variates are produced here rather than through
/// <random> distributions, whose algorithms are implementation-defined.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal (Box-Muller).
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double theta = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = engine_();
        while (x >= limit) {
            x = engine_();
        }
        return x % n;
    }

    /// Index drawn from a discrete distribution (weights need not be normalized).
    std::size_t categorical(const std::vector<double> &weights) {
        double total = 0.0;
        for (double w : weights) {
            total += w;
        }
        const double u = uniform() * total;
        double acc = 0.0;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] > 0.0) {
                last_positive = i;
            }
            acc += weights[i];
            if (u < acc && weights[i] > 0.0) {
                return i;
            }
        }
        return last_positive;
    }

    Complex complex_normal() {
        const double re = normal();
        const double im = normal();
        return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
    }

   private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline CMatrix random_gaussian_matrix(std::size_t d, Rng &rng) {
    const auto n = static_cast<Eigen::Index>(d);
    CMatrix g(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index r = 0; r < n; ++r) {
            g(r, c) = rng.complex_normal();
        }
    }
    return g;
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the
/// diagonal of R made positive.
inline PseudoObservable random_unitary(std::size_t d, Rng &rng) {
    const CMatrix g = random_gaussian_matrix(d, rng);
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        const Complex rjj = r(j, j);
        const double mag = std::abs(rjj);
        q.col(j) *= mag > 0.0 ? rjj / mag : Complex(1.0, 0.0);
    }
    return PseudoObservable(std::move(q));
}

/// Arbitrary complex matrix, entries standard complex normal.
inline PseudoObservable random_pseudo(std::size_t d, Rng &rng) {
    return PseudoObservable(random_gaussian_matrix(d, rng));
}

/// GUE-like Hermitian matrix.
inline Observable random_observable(std::size_t d, Rng &rng) {
    const CMatrix g = random_gaussian_matrix(d, rng);
    CMatrix h = (g + g.adjoint()) * 0.5;
    return Observable(std::move(h));
}

inline ProjectorBasis random_basis(std::size_t d, Rng &rng) {
    return ProjectorBasis(random_unitary(d, rng).components());
}

/// Uniform point on the probability simplex (flat Dirichlet).
inline std::vector<double> random_probabilities(std::size_t d, Rng &rng) {
    std::vector<double> p(d);
    double total = 0.0;
    for (double &x : p) {
        double u = rng.uniform();
        while (u <= 0.0) {
            u = rng.uniform();
        }
        x = -std::log(u);
        total += x;
    }
    for (double &x : p) {
        x /= total;
    }
    return p;
}

/// Unit vector, uniformly distributed on the complex sphere.
inline CVector random_unit_vector(std::size_t d, Rng &rng) {
    CVector v(static_cast<Eigen::Index>(d));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v[i] = rng.complex_normal();
    }
    return v / v.norm();
}

}  // namespace pobs
