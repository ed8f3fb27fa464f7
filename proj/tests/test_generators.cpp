#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>

#include "mulimit/errors.hpp"
#include "mulimit/generators.hpp"

using namespace mulimit;

namespace {

std::string drive(GeneratorMachine& g, std::size_t symbols) {
    while (g.emitted().size() < symbols) {
        g.emit_next(1'000'000);
    }
    return g.output_alphabet().render(g.emitted());
}

// s^k(seed) by direct string rewriting.
std::string iterate_substitution(const std::string& seed, int k,
                                 const std::string& image_a, const std::string& image_b) {
    std::string cur = seed;
    for (int i = 0; i < k; ++i) {
        std::string next;
        for (char c : cur) {
            next += (c == 'a') ? image_a : image_b;
        }
        cur = next;
    }
    return cur;
}

double prefix_density(const std::string& s, std::size_t h, const std::string& u) {
    std::size_t n = 0;
    for (std::size_t i = 0; i + u.size() <= h; ++i) {
        if (s.compare(i, u.size(), u) == 0) {
            ++n;
        }
    }
    return static_cast<double>(n) / static_cast<double>(h);
}

SoficSpec single_loop() {
    SoficSpec spec;
    spec.alphabet = Alphabet("1");
    spec.states = {"s"};
    spec.edges = {{0, 0, 0}};
    return spec;
}

} // namespace

TEST_CASE("emit_next examples") {
    auto fib = substitution_stream(fibonacci_substitution());
    const auto r = fib->emit_next(1'000'000);
    REQUIRE(r.symbol.has_value());
    CHECK(fib->output_alphabet().glyph(*r.symbol) == 'a');

    auto g = substitution_stream(fibonacci_substitution());
    const auto z = g->emit_next(0);
    CHECK_FALSE(z.symbol.has_value());
    CHECK(z.steps == 0);
    CHECK(g->emitted().empty());

    auto tm = substitution_stream(thue_morse_substitution());
    CHECK(drive(*tm, 3) == "abb");
    const auto next = tm->emit_next(1'000'000);
    REQUIRE(next.symbol.has_value());
    CHECK(tm->output_alphabet().glyph(*next.symbol) == 'a');
}

TEST_CASE("substitution_stream examples") {
    auto fib = substitution_stream(fibonacci_substitution());
    CHECK(drive(*fib, 5) == "abaab");
    auto tm = substitution_stream(thue_morse_substitution());
    CHECK(drive(*tm, 4) == "abba");

    SubstitutionSpec frozen;
    frozen.alphabet = Alphabet("ab");
    frozen.images = {frozen.alphabet.parse("a"), frozen.alphabet.parse("b")};
    CHECK_THROWS_AS(substitution_stream(frozen), ValidationError);

    SubstitutionSpec bad_seed = fibonacci_substitution();
    bad_seed.seed = 1; // b -> a does not start with b
    CHECK_THROWS_AS(substitution_stream(bad_seed), ValidationError);

    SubstitutionSpec not_primitive;
    not_primitive.alphabet = Alphabet("ab");
    not_primitive.images = {not_primitive.alphabet.parse("aa"), not_primitive.alphabet.parse("b")};
    CHECK_THROWS_AS(substitution_stream(not_primitive), ValidationError);
}

TEST_CASE("substitution stream equals iterated images") {
    const std::string fib = iterate_substitution("a", 15, "ab", "a");
    const std::string tm = iterate_substitution("a", 12, "ab", "ba");
    auto g1 = substitution_stream(fibonacci_substitution());
    auto g2 = substitution_stream(thue_morse_substitution());
    CHECK(drive(*g1, fib.size()) == fib);
    CHECK(drive(*g2, tm.size()) == tm);
}

TEST_CASE("sofic_generic_stream examples") {
    auto even = sofic_generic_stream(even_shift());
    CHECK(drive(*even, 9) == "0" "11" "011" "110");

    auto ones = sofic_generic_stream(single_loop());
    CHECK(drive(*ones, 12) == "111111111111");

    SoficSpec disconnected = even_shift();
    disconnected.edges = {{0, 0, 0}, {0, 1, 1}};
    CHECK_THROWS_AS(sofic_generic_stream(disconnected), ValidationError);

    auto big = sofic_generic_stream(even_shift());
    const std::string s = drive(*big, 10'000);
    CHECK(s.find("0110") != std::string::npos);
    CHECK(s.find("010") == std::string::npos);
}

TEST_CASE("sofic stream enumerates closed walks by length then label") {
    // Oracle: brute-force every binary word of length k, keep labels of closed
    // walks from p that are not a repetition of a shorter closed walk from p.
    auto walks = [](std::size_t k) {
        std::vector<std::string> out;
        for (std::uint64_t m = 0; m < (std::uint64_t{1} << k); ++m) {
            std::string label;
            for (std::size_t i = 0; i < k; ++i) {
                label.push_back(((m >> (k - 1 - i)) & 1) ? '1' : '0');
            }
            std::vector<int> states{0}; // p = 0, q = 1
            bool ok = true;
            for (char c : label) {
                const int s = states.back();
                if (s == 0) {
                    states.push_back(c == '0' ? 0 : 1);
                } else if (c == '1') {
                    states.push_back(0);
                } else {
                    ok = false;
                    break;
                }
            }
            if (!ok || states.back() != 0) {
                continue;
            }
            bool repeat = false;
            for (std::size_t d = 1; d < k && !repeat; ++d) {
                if (k % d == 0 && states[d] == 0) {
                    std::string rep;
                    while (rep.size() < k) {
                        rep += label.substr(0, d);
                    }
                    repeat = rep == label;
                }
            }
            if (!repeat) {
                out.push_back(label);
            }
        }
        return out;
    };
    std::string expected;
    for (std::size_t k = 1; k <= 10; ++k) {
        for (const auto& l : walks(k)) {
            expected += l;
        }
    }
    auto g = sofic_generic_stream(even_shift());
    CHECK(drive(*g, expected.size()) == expected);
}

TEST_CASE("enumerate_family capacity") {
    FamilySpec five;
    for (int i = 0; i < 5; ++i) {
        five.members.emplace_back(fibonacci_substitution());
    }
    CHECK(enumerate_family(five, 6).size() == 2); // n = 64
    CHECK(enumerate_family(five, 2).size() == 1); // n = 4
    CHECK(enumerate_family(five, 1).size() == 0);
    FamilySpec one;
    one.members.emplace_back(even_shift());
    CHECK(enumerate_family(one, 64).size() == 1); // n = 2^64
    CHECK_THROWS_AS(enumerate_family(one, 0), ContractViolation);
}

TEST_CASE("property: write-once and nondecreasing accounting under random budgets") {
    std::mt19937_64 rng(3);
    for (const SubshiftSpec& spec :
         {SubshiftSpec(fibonacci_substitution()), SubshiftSpec(thue_morse_substitution()),
          SubshiftSpec(even_shift())}) {
        auto reference = make_generator(spec);
        drive(*reference, 3000);
        for (int schedule = 0; schedule < 5; ++schedule) {
            auto g = make_generator(spec);
            Word before;
            std::uint64_t steps = 0;
            std::uint64_t cells = 0;
            while (g->emitted().size() < 3000) {
                g->emit_next(1 + rng() % 7);
                REQUIRE(before.is_prefix_of(g->emitted()));
                REQUIRE(g->steps_used() >= steps);
                REQUIRE(g->cells_used() >= cells);
                before = g->emitted();
                steps = g->steps_used();
                cells = g->cells_used();
            }
            CHECK(g->emitted() == Word(std::vector<Symbol>(reference->emitted().begin(),
                                                           reference->emitted().begin() + 3000)));
        }
    }
}

TEST_CASE("property: clones continue identically") {
    auto g = make_generator(SubshiftSpec(thue_morse_substitution()));
    drive(*g, 100);
    auto c = g->clone();
    drive(*g, 500);
    drive(*c, 500);
    CHECK(g->emitted() == c->emitted());
}

TEST_CASE("property: language constraints to horizon 1e5") {
    constexpr std::size_t H = 100'000;
    auto fib = substitution_stream(fibonacci_substitution());
    const std::string f = drive(*fib, H);
    CHECK(f.find("bb") == std::string::npos);

    auto even = sofic_generic_stream(even_shift());
    const std::string e = drive(*even, H);
    const auto first = e.find('0');
    const auto last = e.rfind('0');
    std::size_t run = 0;
    bool all_even = true;
    for (std::size_t i = first; i <= last; ++i) {
        if (e[i] == '1') {
            ++run;
        } else {
            all_even = all_even && run % 2 == 0;
            run = 0;
        }
    }
    CHECK(all_even);
}

TEST_CASE("property: language words have stable positive density") {
    constexpr std::size_t H = 100'000;
    auto fib = substitution_stream(fibonacci_substitution());
    const std::string f = drive(*fib, H);
    for (const std::string u : {"a", "b", "ab", "ba", "aa", "aab", "aba", "baa", "bab", "abaab"}) {
        const double full = prefix_density(f, H, u);
        const double half = prefix_density(f, H / 2, u);
        CAPTURE(u);
        CHECK(full > 0.0);
        CHECK(full <= 2 * half);
        CHECK(half <= 2 * full);
    }
    auto even = sofic_generic_stream(even_shift());
    const std::string e = drive(*even, H);
    for (const std::string u : {"0", "1", "00", "11", "011", "110", "0110", "11110", "0011"}) {
        const double full = prefix_density(e, H, u);
        const double half = prefix_density(e, H / 2, u);
        CAPTURE(u);
        CHECK(full > 0.0);
        CHECK(full <= 2 * half);
        CHECK(half <= 2 * full);
    }
}

TEST_CASE("floor_log2") {
    CHECK(floor_log2(1) == 0);
    CHECK(floor_log2(2) == 1);
    CHECK(floor_log2(63) == 5);
    CHECK(floor_log2(64) == 6);
    CHECK_THROWS_AS(floor_log2(0), ContractViolation);
}
