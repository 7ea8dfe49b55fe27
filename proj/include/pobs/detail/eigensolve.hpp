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
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

#include "pobs/config.hpp"

namespace pobs::detail {

struct EigenPairs {
    Eigen::VectorXd values;  // descending
    CMatrix vectors;         // column j pairs with values[j]
};

/// Makes the largest-magnitude entry real positive. Among entries of equal
/// magnitude (to 1e-9 relative) the first wins.
inline void fix_phase(Eigen::Ref<CVector> v) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        best = std::max(best, std::abs(v[i]));
    }
    if (best == 0.0) {
        return;
    }
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) >= best * (1.0 - 1e-9)) {
            const Complex phase = std::conj(v[i]) / std::abs(v[i]);
            v *= phase;
            v[i] = Complex(v[i].real(), 0.0);
            return;
        }
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues descending,
/// eigenvectors phase-fixed.
inline EigenPairs hermitian_eigen(const CMatrix &h) {
    const CMatrix sym = (h + h.adjoint()) * 0.5;
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
    const Eigen::Index n = sym.rows();
    EigenPairs out{Eigen::VectorXd(n), CMatrix(n, n)};
    for (Eigen::Index j = 0; j < n; ++j) {
        out.values[j] = solver.eigenvalues()[n - 1 - j];
        out.vectors.col(j) = solver.eigenvectors().col(n - 1 - j);
        fix_phase(out.vectors.col(j));
    }
    return out;
}

/// Grouping band for eigenvalue equality: eps relative to the spectral
/// diameter, absolute when the diameter is below 1.
inline double degeneracy_band(const Eigen::VectorXd &values, double eps) {
    if (values.size() == 0) {
        return eps;
    }
    const double diameter = values.maxCoeff() - values.minCoeff();
    const double mag = values.cwiseAbs().maxCoeff();
    return eps * std::max({1.0, diameter, mag});
}

/// Runs of consecutive (descending) values closer than `band`.
inline std::vector<std::vector<Eigen::Index>> cluster_sorted(const Eigen::VectorXd &desc, double band) {
    std::vector<std::vector<Eigen::Index>> groups;
    for (Eigen::Index j = 0; j < desc.size(); ++j) {
        if (groups.empty() || std::abs(desc[groups.back().back()] - desc[j]) > band) {
            groups.emplace_back();
        }
        groups.back().push_back(j);
    }
    return groups;
}

/// Simultaneous diagonalization of a commuting Hermitian family by
/// successive refinement of joint eigenspaces.
///
/// Returns orthonormal columns and, per column, the tuple of eigenvalues
/// (one per family member). Within a joint eigenspace that the family does
/// not resolve, the columns are whatever orthonormal completion the
/// refinement produced.
struct JointEigen {
    CMatrix vectors;
    std::vector<std::vector<double>> labels;  // labels[j][a] = o_{a,j}
};

inline JointEigen joint_diagonalize(const std::vector<CMatrix> &family, double deg_eps) {
    const Eigen::Index n = family.front().rows();
    std::vector<CMatrix> blocks{CMatrix::Identity(n, n)};
    std::vector<double> bands;
    for (const CMatrix &o : family) {
        bands.push_back(degeneracy_band(hermitian_eigen(o).values, deg_eps));
    }
    for (std::size_t a = 0; a < family.size(); ++a) {
        std::vector<CMatrix> next;
        for (const CMatrix &v : blocks) {
            const CMatrix restricted = v.adjoint() * family[a] * v;
            const EigenPairs ep = hermitian_eigen(restricted);
            for (const auto &g : cluster_sorted(ep.values, bands[a])) {
                CMatrix sub(n, static_cast<Eigen::Index>(g.size()));
                for (std::size_t c = 0; c < g.size(); ++c) {
                    sub.col(static_cast<Eigen::Index>(c)) = v * ep.vectors.col(g[c]);
                }
                next.push_back(std::move(sub));
            }
        }
        blocks = std::move(next);
    }

    JointEigen out{CMatrix(n, n), {}};
    Eigen::Index col = 0;
    for (const CMatrix &b : blocks) {
        for (Eigen::Index c = 0; c < b.cols(); ++c, ++col) {
            CVector v = b.col(c);
            v.normalize();
            fix_phase(v);
            out.vectors.col(col) = v;
            std::vector<double> label;
            for (const CMatrix &o : family) {
                label.push_back((v.adjoint() * o * v)(0, 0).real());
            }
            out.labels.push_back(std::move(label));
        }
    }

    // Descending lexicographic order of the label tuples, equality per band.
    std::vector<std::size_t> order(out.labels.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        for (std::size_t a = 0; a < bands.size(); ++a) {
            const double dx = out.labels[x][a];
            const double dy = out.labels[y][a];
            if (std::abs(dx - dy) > bands[a]) {
                return dx > dy;
            }
        }
        return false;
    });
    JointEigen sorted{CMatrix(n, n), {}};
    for (std::size_t j = 0; j < order.size(); ++j) {
        sorted.vectors.col(static_cast<Eigen::Index>(j)) = out.vectors.col(static_cast<Eigen::Index>(order[j]));
        sorted.labels.push_back(out.labels[order[j]]);
    }
    return sorted;
}

}  // namespace pobs::detail
