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

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pobs/algebra.hpp"
#include "pobs/bases.hpp"
#include "pobs/measurement.hpp"

namespace pobs {

inline constexpr const char *kScenarioSchema = R"(# Scenario file schema (YAML).
#
# dim: <int >= 1>                     Hilbert-space dimension d.
# observables:                        Named Hermitian d x d matrices, in the
#   <name>:                           order they should appear in reports.
#     - [<entry>, ...]                One list per row. An entry is a real
#     - ...                           number or a string "a+bi", "a-bi", "bi".
# initial:
#   basis: computational              The standard basis,
#        | [<name>, ...]              or the joint eigenbasis of a commuting
#                                     family of named observables,
#        | [[<entry>, ...], ...]      or d explicit orthonormal vectors.
#   probabilities: [<p_0>, ...]       Distribution over that basis.
# steps:                              Measurements, applied in order.
#   - measure: [<name>, ...]          A commuting family of named observables.
# samples: <int >= 1>                 Monte Carlo trajectories (default 100000).
# seed: <uint64>                      Root seed (default 1).
#
# Names match [A-Za-z_][A-Za-z0-9_]*. Unknown keys are rejected.
)";

struct NamedObservable {
    std::string name;
    Observable value;
};

struct InitialState {
    enum class Kind { Computational, Family, Vectors };
    Kind kind = Kind::Computational;
    std::vector<std::string> family;
    std::vector<CVector> vectors;
    std::vector<double> probabilities;
};

struct Step {
    std::vector<std::string> measure;
};

struct Scenario {
    std::size_t dim = 0;
    std::vector<NamedObservable> observables;
    InitialState initial;
    std::vector<Step> steps;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 1;

    [[nodiscard]] const Observable *find(const std::string &name) const {
        for (const auto &o : observables) {
            if (o.name == name) {
                return &o.value;
            }
        }
        return nullptr;
    }
    [[nodiscard]] std::vector<Observable> family(const std::vector<std::string> &names) const {
        std::vector<Observable> out;
        for (const auto &n : names) {
            const Observable *o = find(n);
            if (o == nullptr) {
                throw Error(ErrorKind::ValidationError, "unknown observable " + n);
            }
            out.push_back(*o);
        }
        return out;
    }
};

/// Exact equality of the data model (used for round-trip checks).
inline bool operator==(const Scenario &a, const Scenario &b) {
    if (a.dim != b.dim || a.samples != b.samples || a.seed != b.seed || a.observables.size() != b.observables.size() ||
        a.steps.size() != b.steps.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.observables.size(); ++i) {
        if (a.observables[i].name != b.observables[i].name ||
            a.observables[i].value.components() != b.observables[i].value.components()) {
            return false;
        }
    }
    for (std::size_t i = 0; i < a.steps.size(); ++i) {
        if (a.steps[i].measure != b.steps[i].measure) {
            return false;
        }
    }
    const InitialState &x = a.initial;
    const InitialState &y = b.initial;
    if (x.kind != y.kind || x.family != y.family || x.probabilities != y.probabilities ||
        x.vectors.size() != y.vectors.size()) {
        return false;
    }
    for (std::size_t i = 0; i < x.vectors.size(); ++i) {
        if (x.vectors[i] != y.vectors[i]) {
            return false;
        }
    }
    return true;
}

namespace detail {

inline bool parse_real(const std::string &s, double &out) {
    if (s.empty()) {
        return false;
    }
    char *end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(out);
}

}  // namespace detail

/// Parses "a", "bi", "a+bi", "a-bi" (also "i", "-i", exponents).
inline bool parse_complex(std::string s, Complex &out) {
    std::erase_if(s, [](unsigned char c) { return std::isspace(c) != 0; });
    if (s.empty()) {
        return false;
    }
    if (s.back() != 'i' && s.back() != 'j') {
        double re = 0.0;
        if (!detail::parse_real(s, re)) {
            return false;
        }
        out = Complex(re, 0.0);
        return true;
    }
    s.pop_back();
    std::size_t split = std::string::npos;
    for (std::size_t i = s.size(); i-- > 1;) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
            split = i;
            break;
        }
    }
    const std::string re_s = split == std::string::npos ? "" : s.substr(0, split);
    std::string im_s = split == std::string::npos ? s : s.substr(split);
    if (im_s.empty() || im_s == "+") {
        im_s = "1";
    } else if (im_s == "-") {
        im_s = "-1";
    }
    double re = 0.0;
    double im = 0.0;
    if ((!re_s.empty() && !detail::parse_real(re_s, re)) || !detail::parse_real(im_s, im)) {
        return false;
    }
    out = Complex(re, im);
    return true;
}

/// Shortest round-trip text for a double.
inline std::string format_real(double x) {
    if (x == 0.0) {
        return "0";
    }
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) {
            break;
        }
    }
    return buf;
}

inline std::string format_complex_entry(const Complex &c) {
    if (c.imag() == 0.0) {
        return format_real(c.real());
    }
    std::string im = format_real(std::abs(c.imag())) + "i";
    const char sign = std::signbit(c.imag()) ? '-' : '+';
    if (c.real() == 0.0) {
        return std::string("\"") + (sign == '-' ? "-" : "") + im + "\"";
    }
    return "\"" + format_real(c.real()) + sign + im + "\"";
}

namespace detail {

inline std::string where(const YAML::Node &n, const std::string &field) {
    std::string s = "field '" + field + "'";
    if (n.Mark().line >= 0) {
        s = "line " + std::to_string(n.Mark().line + 1) + ": " + s;
    }
    return s;
}

[[noreturn]] inline void parse_fail(const YAML::Node &n, const std::string &field, const std::string &what) {
    throw Error(ErrorKind::ParseError, where(n, field) + ": " + what);
}

inline bool valid_name(const std::string &s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) != 0 || s[0] == '_')) {
        return false;
    }
    return std::all_of(s.begin(), s.end(),
                       [](unsigned char c) { return std::isalnum(c) != 0 || c == '_'; });
}

inline Complex read_entry(const YAML::Node &n, const std::string &field) {
    if (!n.IsScalar()) {
        parse_fail(n, field, "expected a number or complex string");
    }
    Complex c;
    if (!parse_complex(n.Scalar(), c)) {
        parse_fail(n, field, "cannot read '" + n.Scalar() + "' as a complex number");
    }
    return c;
}

inline double read_real(const YAML::Node &n, const std::string &field) {
    double x = 0.0;
    if (!n.IsScalar() || !parse_real(n.Scalar(), x)) {
        parse_fail(n, field, "expected a real number");
    }
    return x;
}

inline std::uint64_t read_uint(const YAML::Node &n, const std::string &field) {
    if (!n.IsScalar()) {
        parse_fail(n, field, "expected a non-negative integer");
    }
    const std::string &s = n.Scalar();
    if (s.empty() || !std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; })) {
        parse_fail(n, field, "expected a non-negative integer, got '" + s + "'");
    }
    errno = 0;
    const unsigned long long v = std::strtoull(s.c_str(), nullptr, 10);
    if (errno == ERANGE) {
        parse_fail(n, field, "integer out of range");
    }
    return v;
}

inline std::string read_name(const YAML::Node &n, const std::string &field) {
    if (!n.IsScalar() || !valid_name(n.Scalar())) {
        parse_fail(n, field, "expected an observable name");
    }
    return n.Scalar();
}

inline std::vector<std::string> read_names(const YAML::Node &n, const std::string &field) {
    if (!n.IsSequence()) {
        parse_fail(n, field, "expected a list of observable names");
    }
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n.size(); ++i) {
        out.push_back(read_name(n[i], field + "[" + std::to_string(i) + "]"));
    }
    return out;
}

inline std::vector<std::vector<Complex>> read_rows(const YAML::Node &n, const std::string &field) {
    if (!n.IsSequence()) {
        parse_fail(n, field, "expected a list of rows");
    }
    std::vector<std::vector<Complex>> rows;
    for (std::size_t i = 0; i < n.size(); ++i) {
        const std::string f = field + "[" + std::to_string(i) + "]";
        if (!n[i].IsSequence()) {
            parse_fail(n[i], f, "expected a list of entries");
        }
        std::vector<Complex> row;
        for (std::size_t k = 0; k < n[i].size(); ++k) {
            row.push_back(read_entry(n[i][k], f + "[" + std::to_string(k) + "]"));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void check_keys(const YAML::Node &map, const std::string &field, std::initializer_list<const char *> allowed) {
    for (const auto &kv : map) {
        const std::string key = kv.first.Scalar();
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char *a) { return key == a; })) {
            parse_fail(kv.first, field.empty() ? key : field + "." + key, "unknown field");
        }
    }
}

inline const YAML::Node require(const YAML::Node &map, const char *key, const std::string &field) {
    const YAML::Node n = map[key];
    if (!n) {
        parse_fail(map, field, std::string("missing field '") + key + "'");
    }
    return n;
}

}  // namespace detail

/// Checks every scenario invariant; throws ValidationError naming the first
/// violated one.
inline void validate(const Scenario &s, const Tolerances &tol = {}) {
    auto fail = [](const std::string &msg) { throw Error(ErrorKind::ValidationError, msg); };
    if (s.dim == 0) {
        fail("dim must be at least 1");
    }
    for (std::size_t i = 0; i < s.observables.size(); ++i) {
        const auto &o = s.observables[i];
        for (std::size_t k = 0; k < i; ++k) {
            if (s.observables[k].name == o.name) {
                fail("observable " + o.name + " defined twice");
            }
        }
        if (o.value.dim() != s.dim) {
            fail("observable " + o.name + " has dimension " + std::to_string(o.value.dim()) + ", expected " +
                 std::to_string(s.dim));
        }
        if (!is_hermitian(o.value.value(), tol)) {
            fail("observable " + o.name + " not Hermitian");
        }
    }
    auto check_family = [&](const std::vector<std::string> &names, const std::string &where) {
        if (names.empty()) {
            fail(where + ": empty family");
        }
        for (const auto &n : names) {
            if (s.find(n) == nullptr) {
                fail(where + ": unknown observable " + n);
            }
        }
        try {
            complete_compatible_basis(s.family(names), tol);
        } catch (const Error &e) {
            if (e.kind() == ErrorKind::NotCommuting) {
                fail(where + ": family not commuting");
            }
            throw;
        }
    };
    ProjectorBasis initial = ProjectorBasis::computational(s.dim);
    switch (s.initial.kind) {
        case InitialState::Kind::Computational:
            break;
        case InitialState::Kind::Family:
            check_family(s.initial.family, "initial basis");
            break;
        case InitialState::Kind::Vectors: {
            if (s.initial.vectors.size() != s.dim) {
                fail("initial basis: expected " + std::to_string(s.dim) + " vectors");
            }
            for (const auto &v : s.initial.vectors) {
                if (static_cast<std::size_t>(v.size()) != s.dim) {
                    fail("initial basis: vector length differs from dim");
                }
            }
            try {
                make_basis(s.initial.vectors, tol);
            } catch (const Error &e) {
                fail(std::string("initial basis: vectors not orthonormal (") + e.what() + ")");
            }
            break;
        }
    }
    try {
        make_density(initial, s.initial.probabilities, tol);
    } catch (const Error &e) {
        fail(std::string("initial distribution invalid: ") + e.what());
    }
    for (std::size_t i = 0; i < s.steps.size(); ++i) {
        check_family(s.steps[i].measure, "step " + std::to_string(i + 1));
    }
    if (s.samples == 0) {
        fail("samples must be at least 1");
    }
}

/// Parses and validates scenario text. `source` labels error messages.
inline Scenario parse_scenario(const std::string &text, const Tolerances &tol = {}) {
    using namespace detail;
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException &e) {
        throw Error(ErrorKind::ParseError, "line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
    if (!root.IsMap()) {
        throw Error(ErrorKind::ParseError, "top level must be a mapping");
    }
    check_keys(root, "", {"dim", "observables", "initial", "steps", "samples", "seed"});

    Scenario s;
    const std::uint64_t dim = read_uint(require(root, "dim", "dim"), "dim");
    if (dim == 0 || dim > 4096) {
        parse_fail(root["dim"], "dim", "dim must be in 1..4096");
    }
    s.dim = static_cast<std::size_t>(dim);

    const YAML::Node obs = require(root, "observables", "observables");
    if (!obs.IsMap()) {
        parse_fail(obs, "observables", "expected a mapping of name to matrix");
    }
    for (const auto &kv : obs) {
        const std::string name = read_name(kv.first, "observables");
        const std::string field = "observables." + name;
        const auto rows = read_rows(kv.second, field);
        if (rows.size() != s.dim || std::any_of(rows.begin(), rows.end(), [&](const auto &r) {
                return r.size() != s.dim;
            })) {
            throw Error(ErrorKind::ValidationError, "observable " + name + " is not " + std::to_string(s.dim) + "x" +
                                                        std::to_string(s.dim));
        }
        CMatrix m(static_cast<Eigen::Index>(s.dim), static_cast<Eigen::Index>(s.dim));
        for (std::size_t r = 0; r < s.dim; ++r) {
            for (std::size_t c = 0; c < s.dim; ++c) {
                m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
            }
        }
        if (!is_hermitian(PseudoObservable(m), tol)) {
            throw Error(ErrorKind::ValidationError, "observable " + name + " not Hermitian");
        }
        s.observables.push_back({name, Observable(PseudoObservable(std::move(m)), tol)});
    }

    const YAML::Node init = require(root, "initial", "initial");
    if (!init.IsMap()) {
        parse_fail(init, "initial", "expected a mapping");
    }
    check_keys(init, "initial", {"basis", "probabilities"});
    const YAML::Node basis = require(init, "basis", "initial.basis");
    if (basis.IsScalar()) {
        if (basis.Scalar() != "computational") {
            parse_fail(basis, "initial.basis", "expected 'computational', a list of names, or a list of vectors");
        }
        s.initial.kind = InitialState::Kind::Computational;
    } else if (basis.IsSequence() && basis.size() > 0 && basis[0].IsSequence()) {
        s.initial.kind = InitialState::Kind::Vectors;
        for (const auto &row : read_rows(basis, "initial.basis")) {
            CVector v(static_cast<Eigen::Index>(row.size()));
            for (std::size_t k = 0; k < row.size(); ++k) {
                v[static_cast<Eigen::Index>(k)] = row[k];
            }
            s.initial.vectors.push_back(std::move(v));
        }
    } else {
        s.initial.kind = InitialState::Kind::Family;
        s.initial.family = read_names(basis, "initial.basis");
    }
    const YAML::Node probs = require(init, "probabilities", "initial.probabilities");
    if (!probs.IsSequence()) {
        parse_fail(probs, "initial.probabilities", "expected a list of numbers");
    }
    for (std::size_t i = 0; i < probs.size(); ++i) {
        s.initial.probabilities.push_back(read_real(probs[i], "initial.probabilities[" + std::to_string(i) + "]"));
    }

    const YAML::Node steps = require(root, "steps", "steps");
    if (!steps.IsSequence()) {
        parse_fail(steps, "steps", "expected a list of steps");
    }
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const std::string field = "steps[" + std::to_string(i) + "]";
        if (!steps[i].IsMap()) {
            parse_fail(steps[i], field, "expected a mapping with 'measure'");
        }
        check_keys(steps[i], field, {"measure"});
        s.steps.push_back({read_names(require(steps[i], "measure", field + ".measure"), field + ".measure")});
    }

    if (root["samples"]) {
        s.samples = read_uint(root["samples"], "samples");
    }
    if (root["seed"]) {
        s.seed = read_uint(root["seed"], "seed");
    }
    validate(s, tol);
    return s;
}

inline std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::IoError, "cannot open " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        throw Error(ErrorKind::IoError, "cannot read " + path);
    }
    return ss.str();
}

inline Scenario load_scenario(const std::string &path, const Tolerances &tol = {}) {
    return parse_scenario(read_file(path), tol);
}

/// Canonical text form; parse_scenario(serialize(s)) == s.
inline std::string serialize(const Scenario &s) {
    std::ostringstream out;
    auto row = [&](auto begin, auto end) {
        out << '[';
        for (auto it = begin; it != end; ++it) {
            out << (it == begin ? "" : ", ") << format_complex_entry(*it);
        }
        out << ']';
    };
    auto names = [&](const std::vector<std::string> &n) {
        out << '[';
        for (std::size_t i = 0; i < n.size(); ++i) {
            out << (i == 0 ? "" : ", ") << n[i];
        }
        out << ']';
    };
    out << "dim: " << s.dim << '\n';
    out << "observables:\n";
    for (const auto &o : s.observables) {
        out << "  " << o.name << ":\n";
        const CMatrix &m = o.value.components();
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            std::vector<Complex> entries(m.row(r).begin(), m.row(r).end());
            out << "    - ";
            row(entries.begin(), entries.end());
            out << '\n';
        }
    }
    out << "initial:\n  basis:";
    switch (s.initial.kind) {
        case InitialState::Kind::Computational:
            out << " computational\n";
            break;
        case InitialState::Kind::Family:
            out << ' ';
            names(s.initial.family);
            out << '\n';
            break;
        case InitialState::Kind::Vectors:
            out << '\n';
            for (const auto &v : s.initial.vectors) {
                std::vector<Complex> entries(v.begin(), v.end());
                out << "    - ";
                row(entries.begin(), entries.end());
                out << '\n';
            }
            break;
    }
    out << "  probabilities: [";
    for (std::size_t i = 0; i < s.initial.probabilities.size(); ++i) {
        out << (i == 0 ? "" : ", ") << format_real(s.initial.probabilities[i]);
    }
    out << "]\n";
    out << "steps:";
    if (s.steps.empty()) {
        out << " []";
    }
    out << '\n';
    for (const auto &st : s.steps) {
        out << "  - measure: ";
        names(st.measure);
        out << '\n';
    }
    out << "samples: " << s.samples << '\n';
    out << "seed: " << s.seed << '\n';
    return out.str();
}

/// The initial projector basis and, for family bases, the eigenvalue labels.
inline CompatibleBasis initial_basis(const Scenario &s, const Tolerances &tol = {}) {
    switch (s.initial.kind) {
        case InitialState::Kind::Family:
            return complete_compatible_basis(s.family(s.initial.family), tol);
        case InitialState::Kind::Vectors:
            return CompatibleBasis{make_basis(s.initial.vectors, tol), {}};
        case InitialState::Kind::Computational:
            break;
    }
    return CompatibleBasis{ProjectorBasis::computational(s.dim), {}};
}

}  // namespace pobs
