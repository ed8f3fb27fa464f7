#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>

#include "mulimit/errors.hpp"
#include "mulimit/symbolic.hpp"

using namespace mulimit;

namespace {

const Alphabet abc("abcd");

Word w(const char* s) { return abc.parse(s); }
CyclicWindow cyc(const char* s) { return CyclicWindow(abc.parse(s)); }

// Naive recount on std::string, written without the library's scan.
std::uint64_t naive_count(const std::string& u, const std::string& v) {
    std::uint64_t n = 0;
    for (std::size_t i = 0; i + v.size() <= u.size(); ++i) {
        if (u.compare(i, v.size(), v) == 0) {
            ++n;
        }
    }
    return n;
}

std::string random_text(std::mt19937_64& g, std::size_t len, int letters) {
    std::string s;
    for (std::size_t i = 0; i < len; ++i) {
        s.push_back(static_cast<char>('a' + g() % static_cast<unsigned>(letters)));
    }
    return s;
}

} // namespace

TEST_CASE("count_occurrences examples") {
    CHECK(count_occurrences(w("aab"), w("a")) == 2);
    CHECK(count_occurrences(w("abc"), w("d")) == 0);
    CHECK(count_occurrences(w("aaaa"), w("aa")) == 3);
    CHECK_THROWS_AS(count_occurrences(w("a"), w("aa")), ContractViolation);
}

TEST_CASE("word_density examples") {
    CHECK(word_density(w("aab"), w("a")) == Rational(1));
    CHECK(word_density(w("aaaa"), w("aa")) == Rational(3, 2));
    CHECK(word_density(w("abc"), w("d")) == Rational(0));
    CHECK_THROWS_AS(word_density(w("ab"), w("ab")), ContractViolation);
}

TEST_CASE("window_density examples") {
    CHECK(window_density(cyc("abab"), w("ab")) == Rational(1, 2));
    CHECK(window_density(cyc("aaaa"), w("a")) == Rational(1));
    CHECK(window_density(cyc("ab"), w("ba")) == Rational(1, 2));
    CHECK_THROWS_AS(window_density(cyc("ab"), w("aba")), ContractViolation);
}

TEST_CASE("set_density examples") {
    const std::vector<Word> both{w("ab"), w("ba")};
    CHECK(set_density(cyc("abab"), both) == Rational(1));
    CHECK(set_density(cyc("aaaa"), std::vector<Word>{}) == Rational(0));
    const std::vector<Word> bb{w("bb")};
    CHECK(set_density(cyc("abba"), bb) == Rational(1, 4));
}

TEST_CASE("alphabet rejects duplicates and round-trips glyphs") {
    CHECK_THROWS_AS(Alphabet("aba"), ValidationError);
    CHECK(abc.render(abc.parse("dcba")) == "dcba");
    CHECK_THROWS_AS(abc.parse("z"), ContractViolation);
}

TEST_CASE("property: count_occurrences agrees with a naive recount") {
    std::mt19937_64 g(7);
    for (int trial = 0; trial < 2000; ++trial) {
        const int letters = 1 + static_cast<int>(g() % 3);
        const std::string u = random_text(g, 1 + g() % 30, letters);
        const std::string v = random_text(g, 1 + g() % u.size(), letters);
        REQUIRE(count_occurrences(w(u.c_str()), w(v.c_str())) == naive_count(u, v));
    }
}

TEST_CASE("property: window densities are rotation invariant and in [0,1]") {
    std::mt19937_64 g(11);
    for (int trial = 0; trial < 500; ++trial) {
        const std::string c = random_text(g, 1 + g() % 25, 2);
        const std::string v = random_text(g, 1 + g() % c.size(), 2);
        const CyclicWindow win = cyc(c.c_str());
        const Rational d = window_density(win, w(v.c_str()));
        CHECK(d >= Rational(0));
        CHECK(d <= Rational(1));
        const auto k = static_cast<std::int64_t>(g() % 60) - 30;
        CHECK(window_density(win.rotated(k), w(v.c_str())) == d);
    }
}

TEST_CASE("property: set_density is additive over disjoint sets") {
    std::mt19937_64 g(13);
    for (int trial = 0; trial < 300; ++trial) {
        const std::string c = random_text(g, 4 + g() % 20, 3);
        std::vector<Word> w1, w2, all;
        for (int i = 0; i < 6; ++i) {
            const Word x = w(random_text(g, 1 + g() % 3, 3).c_str());
            if (std::find(all.begin(), all.end(), x) != all.end()) {
                continue;
            }
            all.push_back(x);
            (i % 2 == 0 ? w1 : w2).push_back(x);
        }
        const CyclicWindow win = cyc(c.c_str());
        CHECK(set_density(win, all) == set_density(win, w1) + set_density(win, w2));
    }
}

TEST_CASE("property: word_density is nonnegative and may exceed one") {
    std::mt19937_64 g(17);
    for (int trial = 0; trial < 300; ++trial) {
        const std::string u = random_text(g, 2 + g() % 20, 2);
        const std::string v = random_text(g, 1 + g() % (u.size() - 1), 2);
        CHECK(word_density(w(u.c_str()), w(v.c_str())) >= Rational(0));
    }
    CHECK(word_density(w("aaa"), w("a")) > Rational(1));
}
