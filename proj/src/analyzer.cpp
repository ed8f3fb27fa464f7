#include "mulimit/analyzer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "mulimit/errors.hpp"

namespace mulimit {

std::vector<DensitySeries> track(const SpaceTimeRecord& record, std::span<const Word> queries,
                                 std::size_t stride) {
    if (stride == 0) {
        throw ContractViolation("track: stride must be positive");
    }
    std::vector<DensitySeries> out;
    for (const Word& q : queries) {
        if (q.empty() || q.size() > record.N) {
            throw ContractViolation("track: query does not fit the window");
        }
        DensitySeries s;
        s.word = q;
        for (std::size_t t = 0; t < record.rows.size(); t += stride) {
            s.samples[t] = window_density(record.rows[t], q).to_double();
        }
        out.push_back(std::move(s));
    }
    return out;
}

DensitySeries average(std::span<const DensitySeries> per_trial) {
    if (per_trial.empty()) {
        throw ContractViolation("average: no series");
    }
    DensitySeries out;
    out.word = per_trial.front().word;
    out.trials = 0;
    std::map<std::uint64_t, Accumulator> acc;
    for (const auto& s : per_trial) {
        if (s.word != out.word) {
            throw ContractViolation("average: series for different words");
        }
        out.trials += s.trials;
        for (auto [t, v] : s.samples) {
            acc[t].add(v);
        }
    }
    for (const auto& [t, a] : acc) {
        out.samples[t] = a.mean();
    }
    return out;
}

std::size_t size_bucket(std::size_t n) { return n == 0 ? 0 : std::bit_ceil(n); }

std::map<std::size_t, double> SegmentStats::per_size_class() const {
    std::map<std::size_t, double> out;
    for (auto [b, c] : class_cells) {
        out[b] = share(c);
    }
    return out;
}

namespace {

template <typename IsSharp, typename Clean, typename Compute>
SegmentStats stats_impl(std::size_t N, std::uint64_t time, IsSharp is_sharp, Clean clean,
                        Compute compute) {
    SegmentStats s;
    s.time = time;
    s.N = N;
    std::vector<std::size_t> sharps;
    for (std::size_t i = 0; i < N; ++i) {
        if (is_sharp(i)) {
            sharps.push_back(i);
        }
    }
    s.sharp_cells = sharps.size();
    if (sharps.empty()) {
        s.out_of_segment_cells = N;
        return s;
    }
    for (std::size_t j = 0; j < sharps.size(); ++j) {
        const std::size_t left = sharps[j];
        const std::size_t right = sharps[(j + 1) % sharps.size()];
        const std::size_t len = sharps.size() == 1 ? N - 1 : (right + N - left - 1) % N;
        bool ok = true;
        for (std::size_t o = 1; o <= len && ok; ++o) {
            ok = clean((left + o) % N);
        }
        if (!ok) {
            s.out_of_segment_cells += len;
            continue;
        }
        std::size_t flagged = 0;
        for (std::size_t o = 1; o <= len; ++o) {
            flagged += compute((left + o) % N) ? 1 : 0;
        }
        s.compute_cells += flagged;
        if (len > flagged) {
            s.class_cells[size_bucket(len)] += len - flagged;
        }
    }
    return s;
}

} // namespace

SegmentStats segment_stats(std::span<const CellState> cells, std::uint64_t time) {
    SegmentStats s = stats_impl(
        cells.size(), time, [&](std::size_t i) { return cells[i].main == kSharp; },
        [&](std::size_t i) {
            return cells[i].tokens == 0 && cells[i].main != kStar && cells[i].probes == 0;
        },
        [&](std::size_t i) { return cells[i].compute; });
    for (const auto& c : cells) {
        s.sep1_cells += c.main == kSep1 ? 1 : 0;
        s.sep2_cells += c.main == kSep2 ? 1 : 0;
    }
    return s;
}

SegmentStats segment_stats(const CyclicWindow& window, Symbol sharp, std::uint64_t time) {
    return stats_impl(
        window.size(), time, [&](std::size_t i) { return window[i] == sharp; },
        [](std::size_t) { return true; }, [](std::size_t) { return false; });
}

const char* verdict_name(VerdictClass c) {
    switch (c) {
    case VerdictClass::Decaying: return "decaying";
    case VerdictClass::Persistent: return "persistent";
    case VerdictClass::Inconclusive: return "inconclusive";
    }
    return "?";
}

TrendSummary trend(const std::map<std::uint64_t, double>& series, std::uint64_t transient) {
    std::vector<double> v;
    for (auto it = series.lower_bound(transient); it != series.end(); ++it) {
        v.push_back(it->second);
    }
    if (v.empty()) {
        throw ContractViolation("trend: no samples after the transient");
    }
    TrendSummary s;
    s.samples = v.size();
    s.peak = *std::max_element(v.begin(), v.end());
    const std::size_t q = std::max<std::size_t>(1, v.size() / 4);
    double first = 0;
    double last = 0;
    for (std::size_t i = 0; i < q; ++i) {
        first += v[i];
        last += v[v.size() - q + i];
    }
    s.first_mean = first / static_cast<double>(q);
    s.final_mean = last / static_cast<double>(q);
    return s;
}

Verdict classify(const DensitySeries& series, std::uint64_t transient) {
    if (series.samples.empty() || series.samples.rbegin()->first <= transient) {
        throw ContractViolation("classify: horizon must exceed the transient");
    }
    const TrendSummary s = trend(series.samples, transient);
    Verdict v;
    v.word = series.word;
    v.transient = transient;
    v.horizon = series.samples.rbegin()->first;
    v.samples = s.samples;
    v.peak = s.peak;
    v.first_mean = s.first_mean;
    v.final_mean = s.final_mean;
    if (s.peak == 0.0) {
        v.cls = VerdictClass::Decaying;
        v.note = "all-zero series";
        return v;
    }
    if (s.final_mean <= v.decay_ratio * s.peak && s.final_mean < s.first_mean) {
        v.cls = VerdictClass::Decaying;
    } else if (s.final_mean > v.persist_ratio * s.peak && s.final_mean > 0) {
        v.cls = VerdictClass::Persistent;
    } else {
        v.cls = VerdictClass::Inconclusive;
    }
    return v;
}

void Accumulator::add(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
}

void Accumulator::merge(const Accumulator& o) {
    if (o.n_ == 0) {
        return;
    }
    if (n_ == 0) {
        *this = o;
        return;
    }
    const double n = static_cast<double>(n_ + o.n_);
    const double d = o.mean_ - mean_;
    mean_ += d * static_cast<double>(o.n_) / n;
    m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
    n_ += o.n_;
}

double Accumulator::variance() const {
    return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
}

double Accumulator::standard_error() const {
    return n_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

ComparisonReport exact_vs_empirical(const LocalRule& rule, const Word& u, std::size_t n,
                                    std::size_t trials, std::size_t N, std::uint64_t seed) {
    if (trials == 0) {
        throw ContractViolation("exact_vs_empirical: trials must be positive");
    }
    ComparisonReport r;
    r.word = u;
    r.time = n;
    r.trials = trials;
    r.exact = exact_measure(rule, u, n).value;
    // uniform over the whole alphabet, '*' included when the rule has one
    const double star =
        rule.alphabet.contains(kStarGlyph) ? 1.0 / static_cast<double>(rule.alphabet.size()) : 0.0;
    Accumulator acc;
    for (std::size_t k = 0; k < trials; ++k) {
        CyclicWindow c = sample_window(rule.alphabet, N, seed, star, k);
        for (std::size_t t = 0; t < n; ++t) {
            c = step(rule, c);
        }
        acc.add(window_density(c, u).to_double());
    }
    r.empirical_mean = acc.mean();
    r.standard_error = acc.standard_error();
    const double diff = std::abs(r.empirical_mean - r.exact.to_double());
    r.agrees = r.standard_error > 0 ? diff <= 3 * r.standard_error : diff < 1e-12;
    return r;
}

} // namespace mulimit
