// Acceptance criteria 1-8. With no argument every criterion runs; with an
// argument K only criterion K runs. One line per criterion:
//   criterion K: PASS|FAIL  <evidence>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mulimit/analyzer.hpp"
#include "mulimit/ca_engine.hpp"
#include "mulimit/construction.hpp"
#include "mulimit/experiment.hpp"
#include "reference_layout.hpp"

using namespace mulimit;

namespace {

struct Outcome {
    bool pass = false;
    std::string evidence;
};

Outcome criterion1() {
    const LocalRule rule = max_automaton();
    std::ostringstream ev;
    bool ok = true;
    for (std::size_t t = 1; t <= 5; ++t) {
        const auto m = exact_measure(rule, Word{0}, t, std::uint64_t{1} << 11);
        const Rational want(1, std::int64_t{1} << (2 * t + 1));
        ok = ok && m.value == want;
        ev << " t=" << t << ":" << m.count << "/" << m.total;
    }
    return {ok, ev.str()};
}

Outcome criterion2() {
    const LocalRule rule = max_automaton();
    std::ostringstream ev;
    bool ok = true;
    for (std::size_t t = 1; t <= 3; ++t) {
        const auto r = exact_vs_empirical(rule, Word{0}, t, 10, 1'000'000, 2024);
        ok = ok && r.agrees;
        char buf[160];
        std::snprintf(buf, sizeof buf, " t=%zu exact=%.6g mean=%.6g se=%.2g", t,
                      r.exact.to_double(), r.empirical_mean, r.standard_error);
        ev << buf;
    }
    return {ok, ev.str()};
}

ConstructionParams fibonacci_params() {
    ConstructionParams p;
    p.family.members.emplace_back(fibonacci_substitution());
    return p;
}

Outcome criterion3() {
    std::uint64_t total = 0;
    std::uint64_t late = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Construction c = Construction::sampled(fibonacci_params(), 2048, seed, 0.05);
        const std::uint64_t cap = 2048 * c.counter_time_constant();
        while (!c.quiescence_time() && c.time() < cap) {
            c.advance();
        }
        const auto kc = c.counter_time_constant();
        for (const auto& e : c.sharp_events()) {
            ++total;
            late += e.time > e.partner_distance * kc ? 1 : 0;
        }
    }
    std::ostringstream ev;
    ev << " runs=20 created=" << total << " late=" << late;
    return {total > 0 && late == 0, ev.str()};
}

Outcome criterion4() {
    std::size_t pairs = 0;
    std::size_t within = 0;
    for (std::size_t n = 2; n <= 16; ++n) {
        for (std::size_t m = n + 1; m <= 16; ++m) {
            for (bool small_left : {true, false}) {
                const std::size_t nl = small_left ? n : m;
                const std::size_t nr = small_left ? m : n;
                const std::size_t a = 2, b = a + nl + 1, e = b + nr + 1;
                std::vector<CellState> cells(e + 8);
                cells[a].main = cells[b].main = cells[e].main = kSharp;
                Construction c(fibonacci_params(), cells);
                c.inject_conscious_segment(a, b);
                c.inject_conscious_segment(b, e);
                const auto il = c.controller_with_left(a)->id;
                const auto ir = c.controller_with_left(b)->id;
                const std::uint64_t horizon = 8 * (cycle_period(m) + cycle_period(n)) + 5000;
                while (c.merge_events().empty() && c.time() < horizon) {
                    c.advance();
                }
                ++pairs;
                if (c.merge_events().empty() || c.cells()[b].main == kSharp) {
                    continue;
                }
                const auto tl = c.l_onsets(il);
                const auto tr = c.l_onsets(ir);
                if (tl.empty() || tr.empty()) {
                    continue;
                }
                const std::uint64_t bound =
                    tl[0] + tr[0] + 2 * (m * m + m) + 2 * (n * n + n);
                within += c.merge_events()[0].time <= bound ? 1 : 0;
            }
        }
    }
    std::size_t quiet = 0;
    for (std::size_t n = 2; n <= 16; ++n) {
        const std::size_t a = 2, b = a + n + 1, e = b + n + 1;
        std::vector<CellState> cells(e + 8);
        cells[a].main = cells[b].main = cells[e].main = kSharp;
        Construction c(fibonacci_params(), cells);
        c.inject_conscious_segment(a, b);
        c.inject_conscious_segment(b, e);
        const auto id = c.controller_with_left(a)->id;
        while (c.l_onsets(id).size() < 11 && c.time() < 200000) {
            c.advance();
        }
        quiet += (c.l_onsets(id).size() == 11 && c.merge_events().empty()) ? 1 : 0;
    }
    std::ostringstream ev;
    ev << " unequal merged-within-bound=" << within << "/" << pairs << " equal never-merged=" << quiet
       << "/15";
    return {within == pairs && quiet == 15, ev.str()};
}

Outcome criterion5() {
    const Alphabet glyphs(".#$&*ab");
    std::mt19937_64 g(5);
    std::size_t cases = 0;
    std::size_t mismatches = 0;
    std::size_t ruler_bad = 0;
    for (std::size_t n = 1; n <= 400; ++n) {
        for (std::size_t k = 0; k <= 4; ++k) {
            std::vector<std::string> ws;
            std::vector<Word> words;
            for (std::size_t i = 0; i < k; ++i) {
                std::string s;
                for (std::size_t len = 1 + g() % 6; s.size() < len;) {
                    s.push_back("ab"[g() % 2]);
                }
                ws.push_back(s);
                words.push_back(glyphs.parse(s));
            }
            ++cases;
            const auto got = fragment_layout(n, words);
            if (k == 0) {
                mismatches += got.has_value() ? 1 : 0;
                continue;
            }
            if (!got || glyphs.render(*got) != testing::reference_layout(n, ws)) {
                ++mismatches;
            }
            if (k >= 2) {
                std::size_t f = 0;
                while ((f + 1) * (f + 1) <= n) {
                    ++f;
                }
                // distinct one-symbol words make the assignment visible
                std::vector<Word> marks;
                for (std::size_t i = 0; i < k; ++i) {
                    marks.push_back(Word{static_cast<Symbol>(kFirstOutput + i)});
                }
                const Word out = *fragment_layout(n, marks);
                std::size_t w1 = 0;
                for (std::size_t j = 0; j < f && f > 1; ++j) {
                    w1 += out[j * f] == kFirstOutput ? 1 : 0;
                }
                if (f > 1 && (w1 < f / 2 || w1 > (f + 1) / 2)) {
                    ++ruler_bad;
                }
            }
        }
    }
    std::ostringstream ev;
    ev << " layouts=" << cases << " mismatches=" << mismatches << " ruler-violations=" << ruler_bad;
    return {mismatches == 0 && ruler_bad == 0, ev.str()};
}

struct BigRuns {
    ExperimentResult fib;
    ExperimentResult sofic;
};

ExperimentConfig big_config(const SubshiftSpec& member, std::vector<std::string> queries) {
    ExperimentConfig c;
    c.mode = Mode::ConstructRun;
    c.N = 4096;
    c.T = 20000;
    c.trials = 10;
    c.seed = 1;
    c.stride = 20;
    c.family.members.push_back(member);
    c.queries = std::move(queries);
    // uniform Bernoulli over the whole main alphabet
    c.star_density = 1.0 / static_cast<double>(construction_alphabet(c.family).size());
    return c;
}

const BigRuns& big_runs() {
    static const BigRuns runs = [] {
        BigRuns r;
        r.fib = run_experiment(big_config(fibonacci_substitution(), {"bb", "ab"}));
        r.sofic = run_experiment(big_config(even_shift(), {"010", "0110"}));
        return r;
    }();
    return runs;
}

std::string ratio_text(const char* name, const TrendSummary& s) {
    char buf[160];
    std::snprintf(buf, sizeof buf, " %s final/peak=%.4g/%.4g=%.3g", name, s.final_mean, s.peak,
                  s.peak > 0 ? s.final_mean / s.peak : 0.0);
    return buf;
}

bool decays(const TrendSummary& s) { return s.final_mean < kDecayRatio * s.peak || s.peak == 0; }

Outcome criterion6() {
    const auto& r = big_runs().fib;
    const auto sharp = trend(r.series("sharp")->mean, r.transient);
    const auto out = trend(r.series("out_of_segment")->mean, r.transient);
    std::string ev = " transient=" + std::to_string(r.transient) + ratio_text("sharp", sharp) +
                     ratio_text("out_of_segment", out);
    return {decays(sharp) && decays(out), ev};
}

Outcome criterion7() {
    const auto& f = big_runs().fib;
    const auto& s = big_runs().sofic;
    std::ostringstream ev;
    bool ok = true;
    auto check = [&](const ExperimentResult& r, std::size_t i, VerdictClass want) {
        const Verdict& v = r.verdicts[i];
        ok = ok && v.cls == want;
        char buf[160];
        std::snprintf(buf, sizeof buf, " %s=%s(%.3g/%.3g)", r.alphabet.render(v.word).c_str(),
                      verdict_name(v.cls), v.final_mean, v.peak);
        ev << buf;
    };
    check(f, 0, VerdictClass::Decaying);
    check(f, 1, VerdictClass::Persistent);
    check(s, 0, VerdictClass::Decaying);
    check(s, 1, VerdictClass::Persistent);
    return {ok, ev.str()};
}

Outcome criterion8() {
    const auto& r = big_runs().fib;
    bool ok = true;
    std::string ev;
    for (const char* name : {"compute", "sep1", "sep2"}) {
        const auto t = trend(r.series(name)->mean, r.transient);
        ok = ok && decays(t);
        ev += ratio_text(name, t);
    }
    return {ok, ev};
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::function<Outcome()>> criteria{criterion1, criterion2, criterion3,
                                                         criterion4, criterion5, criterion6,
                                                         criterion7, criterion8};
    std::size_t only = 0;
    if (argc > 1) {
        only = std::strtoul(argv[1], nullptr, 10);
        if (only < 1 || only > criteria.size()) {
            std::fprintf(stderr, "usage: %s [1-8]\n", argv[0]);
            return 1;
        }
    }
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (only != 0 && only != i + 1) {
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        const Outcome o = criteria[i]();
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %zu: %s %s (%.1fs)\n", i + 1, o.pass ? "PASS" : "FAIL",
                    o.evidence.c_str(), secs);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
