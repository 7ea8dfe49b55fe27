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
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pobs/measurement.hpp"
#include "pobs/random.hpp"
#include "pobs/scenario.hpp"

namespace pobs {

/// Density bookkeeping of one observer. Entry 0 is the initial state; entry
/// s is the state after step s. Updates append, never overwrite.
class ObserverRecord {
   public:
    struct Entry {
        std::size_t step;
        ProjectorBasis basis;
        DensityObservable density;
    };

    explicit ObserverRecord(DensityObservable initial) {
        history_.push_back({0, initial.basis(), std::move(initial)});
    }

    /// Projects the current density onto `basis` and records the result.
    const DensityObservable &measure(const ProjectorBasis &basis, const Tolerances &tol = {}) {
        DensityObservable next = project_density(current(), basis, tol);
        history_.push_back({history_.size(), basis, std::move(next)});
        return current();
    }

    [[nodiscard]] const DensityObservable &current() const noexcept {
        return history_.back().density;
    }
    [[nodiscard]] const std::vector<Entry> &history() const noexcept {
        return history_;
    }

   private:
    std::vector<Entry> history_;
};

enum class SampleStatus { Ok, Flagged, Failed };

inline const char *to_string(SampleStatus s) {
    switch (s) {
        case SampleStatus::Ok: return "ok";
        case SampleStatus::Flagged: return "flag";
        case SampleStatus::Failed: return "FAIL";
    }
    return "?";
}

struct OutcomeRow {
    std::size_t index;
    std::vector<double> labels;
    double probability;
};

struct EmpiricalRow {
    std::size_t index;
    std::uint64_t count;
    double frequency;
    double std_error;
    double z;
    SampleStatus status;
};

struct MomentRow {
    std::string name;
    double mean;
    double variance;
    double stddev;
};

struct UncertaintyRow {
    std::string a;
    std::string b;
    double lhs;
    double rhs;
    bool holds;
};

struct StepReport {
    std::size_t index;  // 0 for the initial state
    std::vector<std::string> measure;
    ProjectorBasis basis;
    std::vector<std::vector<double>> labels;
    std::optional<TransitionMatrix> transition;
    std::vector<OutcomeRow> analytic;
    std::vector<EmpiricalRow> empirical;
    std::vector<MomentRow> moments;
    std::vector<UncertaintyRow> uncertainty;
};

struct Report {
    std::size_t dim;
    std::uint64_t samples;
    std::uint64_t seed;
    std::string initial_basis;
    std::vector<StepReport> steps;  // steps[0] is the initial state
    std::size_t flagged = 0;
    std::size_t failed = 0;
    std::size_t uncertainty_violations = 0;

    [[nodiscard]] bool ok() const noexcept {
        return failed == 0 && uncertainty_violations == 0;
    }
};

struct RunOptions {
    std::optional<std::uint64_t> samples;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;  // 0: hardware concurrency
};

/// Trajectories per independently seeded chunk. Fixed so that results do not
/// depend on the thread count.
inline constexpr std::uint64_t kChunkSize = 4096;

/// z-score of an observed frequency against p with SE = sqrt(p(1-p)/n).
inline double z_score(double frequency, double p, std::uint64_t n, double &se) {
    se = std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
    const double diff = std::abs(frequency - p);
    if (se == 0.0) {
        return diff <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return diff / se;
}

inline SampleStatus classify(double z) {
    if (z > 4.0) {
        return SampleStatus::Failed;
    }
    return z > 3.0 ? SampleStatus::Flagged : SampleStatus::Ok;
}

/// Outcome counts per step from n sampled trajectories. Each trajectory draws
/// its initial pure state from p0, then at every step an outcome from the
/// transition row of the current pure state.
inline std::vector<std::vector<std::uint64_t>> sample_trajectories(const std::vector<double> &p0,
                                                                   const std::vector<TransitionMatrix> &steps,
                                                                   std::uint64_t n, std::uint64_t seed,
                                                                   unsigned threads) {
    const std::size_t d = p0.size();
    std::vector<std::vector<std::vector<double>>> rows(steps.size());
    for (std::size_t s = 0; s < steps.size(); ++s) {
        for (std::size_t j = 0; j < d; ++j) {
            const auto r = steps[s].entries.row(static_cast<Eigen::Index>(j));
            rows[s].emplace_back(r.begin(), r.end());
        }
    }
    const std::uint64_t chunks = (n + kChunkSize - 1) / kChunkSize;
    using Counts = std::vector<std::vector<std::uint64_t>>;
    const Counts zero(steps.size(), std::vector<std::uint64_t>(d, 0));
    std::vector<Counts> per_chunk(chunks, zero);

    auto work = [&](std::uint64_t first, std::uint64_t stride) {
        for (std::uint64_t c = first; c < chunks; c += stride) {
            Rng rng(derive_seed(seed, c));
            const std::uint64_t m = std::min(kChunkSize, n - c * kChunkSize);
            Counts &counts = per_chunk[c];
            for (std::uint64_t t = 0; t < m; ++t) {
                std::size_t j = rng.categorical(p0);
                for (std::size_t s = 0; s < steps.size(); ++s) {
                    j = rng.categorical(rows[s][j]);
                    ++counts[s][j];
                }
            }
        }
    };
    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(chunks, 1)));
    if (workers <= 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work, w, workers);
        }
        for (auto &t : pool) {
            t.join();
        }
    }
    Counts total = zero;
    for (const Counts &c : per_chunk) {
        for (std::size_t s = 0; s < c.size(); ++s) {
            for (std::size_t k = 0; k < d; ++k) {
                total[s][k] += c[s][k];
            }
        }
    }
    return total;
}

namespace detail {

inline void fill_statistics(const Scenario &s, const DensityObservable &d, StepReport &out, Report &report,
                            const Tolerances &tol) {
    for (std::size_t k = 0; k < d.dim(); ++k) {
        out.analytic.push_back({k, out.labels.empty() ? std::vector<double>{} : out.labels[k], d.probabilities()[k]});
    }
    for (const auto &o : s.observables) {
        const Deviation dev = deviation_variance(o.value, d, tol);
        out.moments.push_back({o.name, expectation(o.value, d).real(), dev.variance, dev.stddev});
    }
    for (std::size_t a = 0; a < s.observables.size(); ++a) {
        for (std::size_t b = a + 1; b < s.observables.size(); ++b) {
            const UncertaintyCheck u = uncertainty_check(s.observables[a].value, s.observables[b].value, d, 1e-10, tol);
            out.uncertainty.push_back({s.observables[a].name, s.observables[b].name, u.lhs, u.rhs, u.holds});
            if (!u.holds) {
                ++report.uncertainty_violations;
            }
        }
    }
}

}  // namespace detail

/// Runs the measurement sequence analytically and by Monte Carlo sampling.
inline Report run_scenario(const Scenario &s, const RunOptions &opt = {}, const Tolerances &tol = {}) {
    validate(s, tol);
    Report report;
    report.dim = s.dim;
    report.samples = opt.samples.value_or(s.samples);
    report.seed = opt.seed.value_or(s.seed);
    if (report.samples == 0) {
        throw Error(ErrorKind::ValidationError, "samples must be at least 1");
    }
    switch (s.initial.kind) {
        case InitialState::Kind::Computational: report.initial_basis = "computational"; break;
        case InitialState::Kind::Vectors: report.initial_basis = "explicit vectors"; break;
        case InitialState::Kind::Family: {
            std::string names;
            for (const auto &n : s.initial.family) {
                names += (names.empty() ? "" : ", ") + n;
            }
            report.initial_basis = "eigenbasis of [" + names + "]";
            break;
        }
    }

    const CompatibleBasis init = initial_basis(s, tol);
    ObserverRecord observer(make_density(init.basis, s.initial.probabilities, tol));
    {
        StepReport r{0, {}, init.basis, init.labels, std::nullopt, {}, {}, {}, {}};
        detail::fill_statistics(s, observer.current(), r, report, tol);
        report.steps.push_back(std::move(r));
    }

    std::vector<TransitionMatrix> transitions;
    for (std::size_t i = 0; i < s.steps.size(); ++i) {
        const CompatibleBasis cb = complete_compatible_basis(s.family(s.steps[i].measure), tol);
        TransitionMatrix t = transition_matrix(observer.current().basis(), cb.basis);
        observer.measure(cb.basis, tol);
        StepReport r{i + 1, s.steps[i].measure, cb.basis, cb.labels, t, {}, {}, {}, {}};
        detail::fill_statistics(s, observer.current(), r, report, tol);
        transitions.push_back(std::move(t));
        report.steps.push_back(std::move(r));
    }

    const auto counts = sample_trajectories(observer.history().front().density.probabilities(), transitions,
                                            report.samples, report.seed, opt.threads);
    for (std::size_t i = 0; i < counts.size(); ++i) {
        StepReport &r = report.steps[i + 1];
        for (std::size_t k = 0; k < s.dim; ++k) {
            const double f = static_cast<double>(counts[i][k]) / static_cast<double>(report.samples);
            double se = 0.0;
            const double z = z_score(f, r.analytic[k].probability, report.samples, se);
            const SampleStatus st = classify(z);
            report.flagged += st == SampleStatus::Flagged ? 1 : 0;
            report.failed += st == SampleStatus::Failed ? 1 : 0;
            r.empirical.push_back({k, counts[i][k], f, se, z, st});
        }
    }
    return report;
}

/// Fixed-precision formatting with negative zero printed as zero.
inline std::string fixed(double x, int precision = 12) {
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, x);
    std::string s = buf;
    if (s[0] == '-' && s.find_first_not_of("-0.") == std::string::npos) {
        s.erase(0, 1);
    }
    return s;
}

inline std::string fixed_complex(const Complex &c, int precision = 12) {
    std::string im = fixed(c.imag(), precision);
    if (im[0] != '-') {
        im = "+" + im;
    }
    return fixed(c.real(), precision) + im + "i";
}

namespace detail {

inline std::string label_text(const std::vector<double> &labels) {
    if (labels.empty()) {
        return "-";
    }
    std::string s = "(";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        s += (i == 0 ? "" : ", ") + fixed(labels[i]);
    }
    return s + ")";
}

}  // namespace detail

/// Structured-text report. Output depends only on the report contents.
inline std::string render_report(const Report &r) {
    std::ostringstream out;
    out << "report: pobs run\n";
    out << "dim: " << r.dim << "\n";
    out << "samples: " << r.samples << "\n";
    out << "seed: " << r.seed << "\n";
    for (const StepReport &st : r.steps) {
        out << "\n";
        if (st.index == 0) {
            out << "[initial]\n";
            out << "basis: " << r.initial_basis << "\n";
        } else {
            out << "[step " << st.index << "]\n";
            out << "measure:";
            for (const auto &n : st.measure) {
                out << " " << n;
            }
            out << "\n";
        }
        out << "basis vectors:\n";
        const CMatrix &v = st.basis.vectors();
        for (Eigen::Index k = 0; k < v.cols(); ++k) {
            out << "  " << k << ":";
            for (Eigen::Index i = 0; i < v.rows(); ++i) {
                out << " " << fixed_complex(v(i, k));
            }
            out << "\n";
        }
        if (st.transition) {
            out << "transition (row: previous outcome, column: this outcome):\n";
            const Eigen::MatrixXd &t = st.transition->entries;
            for (Eigen::Index j = 0; j < t.rows(); ++j) {
                out << "  " << j << ":";
                for (Eigen::Index k = 0; k < t.cols(); ++k) {
                    out << " " << fixed(t(j, k));
                }
                out << "\n";
            }
        }
        out << "analytic:\n";
        out << "  outcome  labels  probability\n";
        for (const OutcomeRow &a : st.analytic) {
            out << "  " << a.index << "  " << detail::label_text(a.labels) << "  " << fixed(a.probability) << "\n";
        }
        if (!st.empirical.empty()) {
            out << "empirical:\n";
            out << "  outcome  count  frequency  stderr  z  status\n";
            for (const EmpiricalRow &e : st.empirical) {
                out << "  " << e.index << "  " << e.count << "  " << fixed(e.frequency) << "  " << fixed(e.std_error)
                    << "  " << fixed(e.z, 3) << "  " << to_string(e.status) << "\n";
            }
        }
        out << "moments:\n";
        out << "  observable  mean  variance  stddev\n";
        for (const MomentRow &m : st.moments) {
            out << "  " << m.name << "  " << fixed(m.mean) << "  " << fixed(m.variance) << "  " << fixed(m.stddev)
                << "\n";
        }
        if (!st.uncertainty.empty()) {
            out << "uncertainty:\n";
            out << "  pair  sigma_product  bound  holds\n";
            for (const UncertaintyRow &u : st.uncertainty) {
                out << "  " << u.a << "," << u.b << "  " << fixed(u.lhs) << "  " << fixed(u.rhs) << "  "
                    << (u.holds ? "yes" : "NO") << "\n";
            }
        }
    }
    out << "\n[summary]\n";
    out << "observer: single record, " << r.steps.size() << " densities in history\n";
    out << "empirical: " << r.failed << " failed, " << r.flagged << " flagged\n";
    out << "uncertainty violations: " << r.uncertainty_violations << "\n";
    out << "status: " << (r.ok() ? "ok" : "FAIL") << "\n";
    return out.str();
}

/// The "analytic:" table of one section of a rendered report, or "" if the
/// section is missing. Sections are "initial" or "step N".
inline std::string analytic_section(const std::string &report, const std::string &section) {
    const std::string header = "[" + section + "]\n";
    const std::size_t at = report.find(header);
    if (at == std::string::npos) {
        return "";
    }
    const std::size_t start = report.find("analytic:\n", at);
    const std::size_t next = report.find("\n[", at + header.size());
    if (start == std::string::npos || (next != std::string::npos && start > next)) {
        return "";
    }
    std::size_t end = start + std::string("analytic:\n").size();
    while (end < report.size() && report.compare(end, 2, "  ") == 0) {
        end = report.find('\n', end) + 1;
    }
    return report.substr(start, end - start);
}

}  // namespace pobs
