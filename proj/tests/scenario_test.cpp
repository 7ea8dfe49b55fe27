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

#include "pobs/scenario.hpp"

#include "gtest/gtest.h"
#include "pobs/run.hpp"
#include "pobs/verify.hpp"
#include "test_util.hpp"

using namespace pobs;
using namespace pobs::testing;

namespace {

const std::string kQubitPath = std::string(POBS_SOURCE_DIR) + "/scenarios/qubit.yaml";

const char *kPauli = R"(dim: 2
observables:
  Z: [[1, 0], [0, -1]]
  X: [[0, 1], [1, 0]]
)";

ErrorKind kind_of(const std::string &text) {
    try {
        parse_scenario(text);
    } catch (const Error &e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error for:\n" << text;
    return ErrorKind::VerificationFailure;
}

std::string message_of(const std::string &text) {
    try {
        parse_scenario(text);
    } catch (const Error &e) {
        return e.what();
    }
    return "";
}

/// Random valid scenario with dimension d: observables drawn from two
/// commuting families, a random initial basis and distribution.
Scenario random_scenario(std::size_t d, std::size_t steps, Rng &rng) {
    Scenario s;
    s.dim = d;
    const CMatrix u1 = random_unitary(d, rng).components();
    const CMatrix u2 = random_unitary(d, rng).components();
    auto diag_in = [&](const CMatrix &u) {
        Eigen::VectorXcd v(static_cast<Eigen::Index>(d));
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            v[i] = rng.normal();
        }
        CMatrix m = u * v.asDiagonal() * u.adjoint();
        return Observable(PseudoObservable(CMatrix((m + m.adjoint()) * 0.5)));
    };
    s.observables.push_back({"A", diag_in(u1)});
    s.observables.push_back({"B", diag_in(u1)});
    s.observables.push_back({"C", diag_in(u2)});
    s.initial.kind = InitialState::Kind::Vectors;
    const CMatrix v = random_unitary(d, rng).components();
    for (Eigen::Index k = 0; k < v.cols(); ++k) {
        s.initial.vectors.emplace_back(v.col(k));
    }
    s.initial.probabilities = random_probabilities(d, rng);
    for (std::size_t i = 0; i < steps; ++i) {
        switch (rng.below(3)) {
            case 0: s.steps.push_back({{"A"}}); break;
            case 1: s.steps.push_back({{"A", "B"}}); break;
            default: s.steps.push_back({{"C"}}); break;
        }
    }
    s.samples = 20000;
    s.seed = rng.below(1000000);
    return s;
}

}  // namespace

TEST(scenario, parse_complex) {
    Complex c;
    ASSERT_TRUE(parse_complex("1.5", c));
    EXPECT_EQ(c, Complex(1.5, 0));
    ASSERT_TRUE(parse_complex("2-3i", c));
    EXPECT_EQ(c, Complex(2, -3));
    ASSERT_TRUE(parse_complex(" -0.5 + 1e-3i ", c));
    EXPECT_EQ(c, Complex(-0.5, 1e-3));
    ASSERT_TRUE(parse_complex("i", c));
    EXPECT_EQ(c, Complex(0, 1));
    ASSERT_TRUE(parse_complex("-i", c));
    EXPECT_EQ(c, Complex(0, -1));
    ASSERT_TRUE(parse_complex("2.5e+2-i", c));
    EXPECT_EQ(c, Complex(250, -1));
    ASSERT_TRUE(parse_complex("4i", c));
    EXPECT_EQ(c, Complex(0, 4));
    EXPECT_FALSE(parse_complex("", c));
    EXPECT_FALSE(parse_complex("1+", c));
    EXPECT_FALSE(parse_complex("abc", c));
    EXPECT_FALSE(parse_complex("1+2", c));
    EXPECT_FALSE(parse_complex("nan", c));
}

TEST(scenario, load_bundled_qubit) {
    const Scenario s = load_scenario(kQubitPath);
    EXPECT_EQ(s.dim, 2u);
    EXPECT_EQ(s.steps.size(), 2u);
    ASSERT_EQ(s.observables.size(), 3u);
    EXPECT_EQ(s.observables[0].name, "Z");
    EXPECT_EQ(s.observables[2].name, "Y");
    EXPECT_EQ(s.observables[2].value.components()(0, 1), Complex(0, -1));
    EXPECT_EQ(s.samples, 100000u);
    EXPECT_EQ(s.seed, 7u);
}

TEST(scenario, validation_errors) {
    const std::string init = "initial:\n  basis: computational\n  probabilities: [1, 0]\n";
    const std::string nh = "dim: 2\nobservables:\n  X: [[0, 1], [0, 0]]\n" + init + "steps: []\n";
    EXPECT_EQ(kind_of(nh), ErrorKind::ValidationError);
    EXPECT_NE(message_of(nh).find("observable X not Hermitian"), std::string::npos);

    const std::string nc = std::string(kPauli) + init + "steps:\n  - measure: [X, Z]\n";
    EXPECT_EQ(kind_of(nc), ErrorKind::ValidationError);
    EXPECT_NE(message_of(nc).find("family not commuting"), std::string::npos);

    EXPECT_EQ(kind_of(std::string(kPauli) + init + "steps:\n  - measure: [W]\n"), ErrorKind::ValidationError);
    EXPECT_EQ(kind_of(std::string(kPauli) + "initial:\n  basis: computational\n  probabilities: [0.5, 0.4]\nsteps: []\n"),
              ErrorKind::ValidationError);
    EXPECT_EQ(kind_of(std::string(kPauli) + "initial:\n  basis: [[1, 0], [1, 0]]\n  probabilities: [1, 0]\nsteps: []\n"),
              ErrorKind::ValidationError);
    EXPECT_EQ(kind_of(std::string(kPauli) + "initial:\n  basis: [X, Z]\n  probabilities: [1, 0]\nsteps: []\n"),
              ErrorKind::ValidationError);
    EXPECT_EQ(kind_of("dim: 3\nobservables:\n  Z: [[1, 0], [0, -1]]\n" + init + "steps: []\n"),
              ErrorKind::ValidationError);
    EXPECT_EQ(kind_of(std::string(kPauli) + init + "steps: []\nsamples: 0\n"), ErrorKind::ValidationError);
}

TEST(scenario, parse_errors_name_line_and_field) {
    const std::string init = "initial:\n  basis: computational\n  probabilities: [1, 0]\n";
    const std::string bad_entry = "dim: 2\nobservables:\n  X: [[0, 1], [1, \"2+q\"]]\n" + init + "steps: []\n";
    EXPECT_EQ(kind_of(bad_entry), ErrorKind::ParseError);
    EXPECT_NE(message_of(bad_entry).find("line 3"), std::string::npos);
    EXPECT_NE(message_of(bad_entry).find("observables.X[1][1]"), std::string::npos);

    const std::string missing = std::string(kPauli) + "steps: []\n";
    EXPECT_EQ(kind_of(missing), ErrorKind::ParseError);
    EXPECT_NE(message_of(missing).find("initial"), std::string::npos);

    const std::string unknown = std::string(kPauli) + init + "steps: []\ncolour: red\n";
    EXPECT_NE(message_of(unknown).find("line 9: field 'colour'"), std::string::npos);

    EXPECT_EQ(kind_of("dim: [2\n"), ErrorKind::ParseError);
    EXPECT_EQ(kind_of("dim: -2\n"), ErrorKind::ParseError);
    EXPECT_EQ(kind_of("- 1\n- 2\n"), ErrorKind::ParseError);
    EXPECT_EQ(kind_of(std::string(kPauli) + init + "steps:\n  - measure: X\n"), ErrorKind::ParseError);

    try {
        load_scenario("/nonexistent/file.yaml");
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::IoError);
    }
}

TEST(scenario, round_trip) {
    const Scenario q = load_scenario(kQubitPath);
    EXPECT_TRUE(parse_scenario(serialize(q)) == q);
    EXPECT_EQ(serialize(parse_scenario(serialize(q))), serialize(q));

    Rng rng(60);
    for (int t = 0; t < 50; ++t) {
        const Scenario s = random_scenario(1 + rng.below(5), rng.below(4), rng);
        const Scenario back = parse_scenario(serialize(s));
        EXPECT_TRUE(back == s) << serialize(s);
    }

    // Family-named initial basis.
    const std::string fam = std::string(kPauli) + "initial:\n  basis: [X]\n  probabilities: [0.25, 0.75]\nsteps: []\n";
    const Scenario f = parse_scenario(fam);
    EXPECT_EQ(f.initial.kind, InitialState::Kind::Family);
    EXPECT_TRUE(parse_scenario(serialize(f)) == f);
}

TEST(scenario, observer_record_appends) {
    ObserverRecord rec(pure_density(ProjectorBasis::computational(2), 0));
    rec.measure(hadamard_basis());
    rec.measure(ProjectorBasis::computational(2));
    ASSERT_EQ(rec.history().size(), 3u);
    EXPECT_EQ(rec.history()[0].density.probabilities()[0], 1.0);
    EXPECT_NEAR(rec.current().probabilities()[0], 0.5, 1e-15);
    EXPECT_EQ(&rec.current(), &rec.history().back().density);
    for (const auto &e : rec.history()) {
        EXPECT_NO_THROW(make_density(e.basis, e.density.probabilities()));
    }
}

TEST(scenario, run_qubit_hadamard_step) {
    const Report r = run_scenario(load_scenario(kQubitPath));
    ASSERT_EQ(r.steps.size(), 3u);
    // trace(I_0 J_+-) = 1/2.
    EXPECT_NEAR(r.steps[1].analytic[0].probability, 0.5, 1e-12);
    EXPECT_NEAR(r.steps[1].analytic[1].probability, 0.5, 1e-12);
    for (const auto &e : r.steps[1].empirical) {
        EXPECT_LE(e.z, 3.0);
    }
    EXPECT_TRUE(r.ok());
    const std::string text = render_report(r);
    EXPECT_EQ(analytic_section(text, "step 1"),
              "analytic:\n"
              "  outcome  labels  probability\n"
              "  0  (1.000000000000)  0.500000000000\n"
              "  1  (-1.000000000000)  0.500000000000\n");
    EXPECT_EQ(text.find("-0.000000000000"), std::string::npos);
}

TEST(scenario, run_single_step_in_initial_basis) {
    Rng rng(61);
    const std::vector<double> p = random_probabilities(2, rng);
    const Scenario s = parse_scenario(std::string(kPauli) + "initial:\n  basis: computational\n  probabilities: [" +
                                      format_real(p[0]) + ", " + format_real(p[1]) + "]\nsteps:\n  - measure: [Z]\n");
    const Report r = run_scenario(s);
    EXPECT_NEAR(r.steps[1].analytic[0].probability, p[0], 1e-15);
    EXPECT_NEAR(r.steps[1].analytic[1].probability, p[1], 1e-15);
    EXPECT_EQ(r.steps[1].transition->entries, Eigen::MatrixXd::Identity(2, 2));
}

TEST(scenario, run_z_then_x_forgets_z) {
    // After measuring X, the density is identity/2 in the X basis, so <Z> = 0.
    Rng rng(62);
    for (int t = 0; t < 5; ++t) {
        const std::vector<double> p = random_probabilities(2, rng);
        const Scenario s = parse_scenario(std::string(kPauli) + "initial:\n  basis: computational\n  probabilities: [" +
                                          format_real(p[0]) + ", " + format_real(p[1]) +
                                          "]\nsteps:\n  - measure: [Z]\n  - measure: [X]\nsamples: 1000\n");
        const Report r = run_scenario(s);
        EXPECT_NEAR(r.steps[2].moments[0].mean, 0.0, 1e-15);
        EXPECT_NEAR(r.steps[2].moments[1].mean, 0.0, 1e-15);
    }
}

TEST(scenario, report_deterministic_across_threads) {
    const Scenario s = load_scenario(kQubitPath);
    RunOptions one;
    one.threads = 1;
    RunOptions four;
    four.threads = 4;
    const std::string a = render_report(run_scenario(s, one));
    EXPECT_EQ(a, render_report(run_scenario(s, four)));
    EXPECT_EQ(a, render_report(run_scenario(s, one)));
    RunOptions other;
    other.seed = 8;
    EXPECT_NE(a, render_report(run_scenario(s, other)));
}

TEST(scenario, z_score_and_classification) {
    double se = 0.0;
    EXPECT_NEAR(z_score(0.51, 0.5, 10000, se), 2.0, 1e-12);
    EXPECT_NEAR(se, 0.005, 1e-15);
    EXPECT_EQ(classify(2.0), SampleStatus::Ok);
    EXPECT_EQ(classify(3.5), SampleStatus::Flagged);
    EXPECT_EQ(classify(4.5), SampleStatus::Failed);
    EXPECT_EQ(z_score(0.0, 0.0, 10, se), 0.0);
    EXPECT_TRUE(std::isinf(z_score(0.1, 0.0, 10, se)));
}

TEST(scenario, fixed_format_normalizes_negative_zero) {
    EXPECT_EQ(fixed(-0.0), "0.000000000000");
    EXPECT_EQ(fixed(-1e-15), "0.000000000000");
    EXPECT_EQ(fixed(-0.5), "-0.500000000000");
    EXPECT_EQ(fixed(0.25, 3), "0.250");
}

TEST(scenario_properties, analytic_empirical_agreement) {
    Rng rng(63);
    std::size_t flagged = 0;
    for (int t = 0; t < 20; ++t) {
        const Scenario s = random_scenario(2 + rng.below(3), 1 + rng.below(3), rng);
        const Report r = run_scenario(s);
        EXPECT_EQ(r.failed, 0u) << serialize(s);
        flagged += r.flagged;
        for (const auto &st : r.steps) {
            double total = 0.0;
            for (const auto &a : st.analytic) {
                total += a.probability;
            }
            EXPECT_NEAR(total, 1.0, 1e-10);
        }
    }
    RecordProperty("flagged", static_cast<int>(flagged));
}

TEST(verify, deterministic_and_fault_injection) {
    VerifyOptions opt;
    opt.trials = 20;
    opt.dim_hi = 5;
    const std::string a = to_json(verify(opt)).dump(2);
    EXPECT_EQ(a, to_json(verify(opt)).dump(2));
    const VerificationReport ok = verify(opt);
    EXPECT_TRUE(ok.passed());

    opt.tol_scale = 0.0;
    const VerificationReport bad = verify(opt);
    EXPECT_FALSE(bad.passed());
    for (const auto &r : bad.results) {
        if (!r.passed()) {
            ASSERT_FALSE(r.offending.empty());
            // The recorded seed reproduces the failing trial.
            const auto props = all_properties();
            const auto it = std::find_if(props.begin(), props.end(), [&](const auto &p) { return p.name == r.name; });
            ASSERT_NE(it, props.end());
            Rng rng(r.offending[0].seed);
            EXPECT_EQ(it->check(rng, r.offending[0].dim), r.offending[0].error);
        }
    }
    EXPECT_THROW(verify(VerifyOptions{5, 2, 10, 1, 1.0}), Error);
}

TEST(verify, property_names_unique) {
    const auto props = all_properties();
    for (std::size_t i = 0; i < props.size(); ++i) {
        for (std::size_t j = i + 1; j < props.size(); ++j) {
            EXPECT_NE(props[i].name, props[j].name);
        }
    }
}
