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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace pobs {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Numerical tolerances used by every validation in the library.
///
/// Matrix-valued checks are absolute for operands of norm <= 1 and relative
/// above that (see `scaled`). `scale_all` multiplies every band at once, which
/// is what the `--tol-scale` CLI flag drives.
struct Tolerances {
    double herm = 1e-9;   // Hermiticity
    double idem = 1e-9;   // idempotency of projectors
    double tr = 1e-9;     // trace == 1 for elementary projectors
    double orth = 1e-9;   // orthonormality / closure of projector bases
    double unit = 1e-9;   // unitarity
    double comm = 1e-9;   // commutation of a compatible family
    double deg = 1e-8;    // eigenvalue grouping, relative to spectral diameter
    double eig = 1e-8;    // right/left eigenvector residual, relative to |Phi|
    double sv = 1e-9;     // state-vector invariants
    double lemma = 1e-9;  // conclusion band of the I J I = I lemma
    double lin = 1e-10;   // linear independence / span membership
    double prob = 1e-9;   // probability distributions
    double norm = 1e-9;   // normalization of eigenstates

    [[nodiscard]] Tolerances scale_all(double f) const {
        Tolerances t = *this;
        for (double *p : {&t.herm, &t.idem, &t.tr, &t.orth, &t.unit, &t.comm, &t.deg, &t.eig, &t.sv,
                          &t.lemma, &t.lin, &t.prob, &t.norm}) {
            *p *= f;
        }
        return t;
    }

    /// Absolute band for magnitude <= 1, relative above.
    [[nodiscard]] static double scaled(double eps, double magnitude) {
        return magnitude > 1.0 ? eps * magnitude : eps;
    }
};

enum class ErrorKind {
    DimensionMismatch,
    IndexOutOfRange,
    NonFinite,
    NotHermitian,
    NotIdempotent,
    NotElementary,
    NotOrthonormal,
    NotUnitary,
    NotCommuting,
    NotInSpectrum,
    NotInSpan,
    NotInFamily,
    NotNormalized,
    ZeroInput,
    LinearlyDependent,
    InvalidDistribution,
    VerificationFailure,
    ParseError,
    ValidationError,
    IoError,
};

inline const char *to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::NonFinite: return "NonFinite";
        case ErrorKind::NotHermitian: return "NotHermitian";
        case ErrorKind::NotIdempotent: return "NotIdempotent";
        case ErrorKind::NotElementary: return "NotElementary";
        case ErrorKind::NotOrthonormal: return "NotOrthonormal";
        case ErrorKind::NotUnitary: return "NotUnitary";
        case ErrorKind::NotCommuting: return "NotCommuting";
        case ErrorKind::NotInSpectrum: return "NotInSpectrum";
        case ErrorKind::NotInSpan: return "NotInSpan";
        case ErrorKind::NotInFamily: return "NotInFamily";
        case ErrorKind::NotNormalized: return "NotNormalized";
        case ErrorKind::ZeroInput: return "ZeroInput";
        case ErrorKind::LinearlyDependent: return "LinearlyDependent";
        case ErrorKind::InvalidDistribution: return "InvalidDistribution";
        case ErrorKind::VerificationFailure: return "VerificationFailure";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ValidationError: return "ValidationError";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, const std::string &what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {
    }
    [[nodiscard]] ErrorKind kind() const noexcept {
        return kind_;
    }

   private:
    ErrorKind kind_;
};

}  // namespace pobs
