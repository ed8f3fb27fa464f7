#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mulimit/analyzer.hpp"
#include "mulimit/construction.hpp"
#include "mulimit/errors.hpp"

using namespace mulimit;

namespace {

DensitySeries series_of(std::initializer_list<double> values) {
    DensitySeries s;
    s.word = Word{0};
    std::uint64_t t = 0;
    for (double v : values) {
        s.samples[t++] = v;
    }
    return s;
}

} // namespace

TEST_CASE("track examples") {
    const LocalRule maxr = max_automaton();
    const auto rec = run(maxr, sample_window(maxr.alphabet, 200'000, 4), 3, 4);
    const std::vector<Word> q{Word{0}};
    const auto s = track(rec, q, 1);
    REQUIRE(s.size() == 1);
    for (std::size_t t = 0; t <= 3; ++t) {
        const double want = std::ldexp(1.0, -static_cast<int>(2 * t + 1));
        CHECK(std::abs(s[0].samples.at(t) - want) < 6 * std::sqrt(want / 200'000));
    }

    const auto constant = run(maxr, CyclicWindow(maxr.alphabet.parse("1111")), 5);
    const std::vector<Word> ones{Word{1, 1}};
    const auto ones_series = track(constant, ones, 2);
    for (auto [t, v] : ones_series[0].samples) {
        CHECK(v == 1.0);
    }
    const auto zeros = track(constant, q, 1);
    CHECK(zeros[0].samples.size() == 6);
    for (auto [t, v] : zeros[0].samples) {
        CHECK(v == 0.0);
    }
    const std::vector<Word> too_long{Word{0, 0, 0, 0, 0}};
    CHECK_THROWS_AS(track(constant, too_long, 1), ContractViolation);
}

TEST_CASE("segment_stats examples") {
    const Alphabet a(".#ab");
    const Symbol sharp = 1;
    const auto s = segment_stats(CyclicWindow(a.parse("#aaa#bb#")), sharp);
    CHECK(s.class_cells.at(4) == 3);
    CHECK(s.class_cells.at(2) == 2);
    CHECK(s.per_size_class().at(4) == doctest::Approx(3.0 / 8));
    CHECK(s.sharp_density() == doctest::Approx(3.0 / 8));
    CHECK(s.out_of_segment_cells == 0);

    const auto blank = segment_stats(CyclicWindow(a.parse("........")), sharp);
    CHECK(blank.out_of_segment() == 1.0);

    const auto ring = segment_stats(CyclicWindow(a.parse("..#.....")), sharp);
    CHECK(ring.class_cells.at(8) == 7);
    CHECK(ring.per_size_class().at(8) == doctest::Approx(7.0 / 8));
}

TEST_CASE("property: segment classes, out-of-segment, # and compute add up to N") {
    ConstructionParams p;
    p.family.members.emplace_back(fibonacci_substitution());
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        auto c = Construction::sampled(p, 777, seed, 0.1);
        for (int t = 0; t < 3000; ++t) {
            c.advance();
            if (t % 7 != 0) {
                continue;
            }
            const auto s = segment_stats(c.cells(), c.time());
            std::size_t total = s.out_of_segment_cells + s.sharp_cells + s.compute_cells;
            for (auto [b, n] : s.class_cells) {
                total += n;
            }
            REQUIRE(total == c.size());
        }
    }
}

TEST_CASE("classify examples") {
    DensitySeries decay;
    decay.word = Word{0};
    for (std::uint64_t t = 0; t < 40; ++t) {
        decay.samples[t] = std::ldexp(1.0, -static_cast<int>(2 * t + 1));
    }
    CHECK(classify(decay, 0).cls == VerdictClass::Decaying);

    CHECK(classify(series_of({0.3, 0.3, 0.3, 0.3, 0.3, 0.3, 0.3, 0.3}), 0).cls ==
          VerdictClass::Persistent);

    DensitySeries osc;
    osc.word = Word{0};
    for (std::uint64_t t = 0; t < 40; ++t) {
        osc.samples[t] = t % 2 == 0 ? 0.4 : 0.0;
    }
    CHECK(classify(osc, 0).cls == VerdictClass::Inconclusive);

    const Verdict zero = classify(series_of({0, 0, 0, 0}), 0);
    CHECK(zero.cls == VerdictClass::Decaying);
    CHECK(zero.note == "all-zero series");

    CHECK_THROWS_AS(classify(series_of({1, 1}), 1), ContractViolation);
}

TEST_CASE("classify only looks past the transient") {
    // huge early values are ignored once the transient covers them
    auto s = series_of({9, 9, 0.2, 0.2, 0.2, 0.2, 0.2, 0.2});
    CHECK(classify(s, 2).cls == VerdictClass::Persistent);
    CHECK(classify(s, 0).cls == VerdictClass::Decaying);
}

TEST_CASE("property: classify is invariant under positive scaling") {
    std::mt19937_64 g(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        DensitySeries s;
        s.word = Word{1};
        const double slope = u(g) * 2 - 1;
        for (std::uint64_t t = 0; t < 64; ++t) {
            s.samples[t] = std::max(0.0, 0.5 + slope * static_cast<double>(t) / 64 + 0.1 * u(g));
        }
        const auto base = classify(s, 4).cls;
        for (double k : {0.5, 2.0, 0.125, 1024.0}) {
            DensitySeries scaled = s;
            for (auto& [t, v] : scaled.samples) {
                v *= k;
            }
            CHECK(classify(scaled, 4).cls == base);
        }
    }
}

TEST_CASE("accumulator merge equals sequential accumulation") {
    std::mt19937_64 g(2);
    std::normal_distribution<double> d(3.0, 2.0);
    Accumulator all;
    Accumulator a;
    Accumulator b;
    for (int i = 0; i < 1000; ++i) {
        const double x = d(g);
        all.add(x);
        (i % 3 == 0 ? a : b).add(x);
    }
    a.merge(b);
    CHECK(a.count() == all.count());
    CHECK(a.mean() == doctest::Approx(all.mean()).epsilon(1e-12));
    CHECK(a.variance() == doctest::Approx(all.variance()).epsilon(1e-10));
    Accumulator empty;
    empty.merge(all);
    CHECK(empty.mean() == all.mean());
}

TEST_CASE("exact_vs_empirical examples") {
    const LocalRule maxr = max_automaton();
    const auto r2 = exact_vs_empirical(maxr, Word{0}, 2, 10, 1'000'000);
    CHECK(r2.exact == Rational(1, 32));
    CHECK(r2.agrees);
    const auto r0 = exact_vs_empirical(maxr, Word{1, 0}, 0, 5, 100'000);
    CHECK(r0.exact == Rational(1, 4));
    CHECK(r0.agrees);
    const auto r1 = exact_vs_empirical(maxr, Word{1}, 1, 5, 100'000);
    CHECK(r1.exact == Rational(7, 8));
    CHECK(r1.agrees);
    CHECK_THROWS_AS(exact_vs_empirical(maxr, Word{0}, 20, 1, 100), EnumerationTooLarge);
}
