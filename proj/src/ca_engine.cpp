#include "mulimit/ca_engine.hpp"

#include "mulimit/errors.hpp"

namespace mulimit {

namespace {

void check_symbols(const Alphabet& alphabet, std::span<const Symbol> cells) {
    for (Symbol s : cells) {
        if (s >= alphabet.size()) {
            throw ContractViolation("cell symbol " + std::to_string(s) +
                                    " outside rule alphabet \"" + alphabet.glyphs() + "\"");
        }
    }
}

std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t cap) {
    std::uint64_t out = 1;
    for (std::uint64_t i = 0; i < exp; ++i) {
        if (out > cap / base) {
            return cap + 1;
        }
        out *= base;
    }
    return out;
}

} // namespace

CyclicWindow step(const LocalRule& rule, const CyclicWindow& c) {
    const std::size_t n = c.size();
    const std::size_t width = 2 * rule.radius + 1;
    if (n < width) {
        throw ContractViolation("step: window smaller than 2r+1");
    }
    check_symbols(rule.alphabet, c.view());
    std::vector<Symbol> hood(width);
    std::vector<Symbol> out(n);
    const auto r = static_cast<std::int64_t>(rule.radius);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < width; ++j) {
            hood[j] = c.at(static_cast<std::int64_t>(i + j) - r);
        }
        out[i] = rule(hood);
    }
    return CyclicWindow(std::move(out));
}

Word apply_to_word(const LocalRule& rule, const Word& v) {
    const std::size_t width = 2 * rule.radius + 1;
    if (v.size() < width - 1) {
        throw ContractViolation("apply_to_word: word shorter than 2r");
    }
    std::vector<Symbol> out;
    if (v.size() >= width) {
        out.reserve(v.size() - width + 1);
        const auto view = v.view();
        for (std::size_t i = 0; i + width <= v.size(); ++i) {
            out.push_back(rule(view.subspan(i, width)));
        }
    }
    return Word(std::move(out));
}

SpaceTimeRecord run(const LocalRule& rule, const CyclicWindow& c, std::size_t T,
                    std::uint64_t seed) {
    struct RuleEvolver {
        const LocalRule* rule;
        CyclicWindow state;
        CyclicWindow snapshot() const { return state; }
        void advance() { state = step(*rule, state); }
    } ev{&rule, c};
    return record_run(ev, T, rule.name, seed);
}

CyclicWindow sample_window(const Alphabet& alphabet, std::size_t N, std::uint64_t seed,
                           double star_density, std::uint64_t stream) {
    if (N < 1) {
        throw ContractViolation("sample_window: N must be >= 1");
    }
    if (!(star_density >= 0.0 && star_density <= 1.0)) {
        throw ContractViolation("sample_window: star_density outside [0,1]");
    }
    const bool has_star = alphabet.contains(kStarGlyph);
    if (star_density > 0.0 && !has_star) {
        throw ContractViolation("sample_window: positive star_density but no '*' in alphabet");
    }
    const Symbol star = has_star ? alphabet.index_of(kStarGlyph) : 0;
    const std::size_t others = alphabet.size() - (has_star ? 1 : 0);
    if (others == 0 && star_density < 1.0) {
        throw ContractViolation("sample_window: alphabet has no symbol besides '*'");
    }
    auto g = make_stream(seed, stream);
    std::vector<Symbol> cells(N);
    for (auto& cell : cells) {
        if (star_density > 0.0 && unit_double(g) < star_density) {
            cell = star;
            continue;
        }
        auto s = static_cast<Symbol>(uniform_below(g, others));
        if (has_star && s >= star) {
            ++s;
        }
        cell = s;
    }
    return CyclicWindow(std::move(cells));
}

std::vector<Word> predecessors(const LocalRule& rule, const Word& u, std::size_t n,
                               std::uint64_t cap) {
    check_symbols(rule.alphabet, u.view());
    const std::size_t len = u.size() + 2 * rule.radius * n;
    const std::uint64_t q = rule.alphabet.size();
    const std::uint64_t space = checked_pow(q, len, cap);
    if (space > cap) {
        throw EnumerationTooLarge("predecessors: |Q|^" + std::to_string(len) +
                                  " candidates exceed the cap of " + std::to_string(cap));
    }
    std::vector<Word> out;
    std::vector<Symbol> v(len, 0);
    for (std::uint64_t idx = 0; idx < space; ++idx) {
        Word w(v);
        for (std::size_t t = 0; t < n; ++t) {
            w = apply_to_word(rule, w);
        }
        if (w == u) {
            out.emplace_back(v);
        }
        // odometer, last position fastest so output is lexicographic
        for (std::size_t j = len; j-- > 0;) {
            if (++v[j] < q) {
                break;
            }
            v[j] = 0;
        }
    }
    return out;
}

MeasureEstimate exact_measure(const LocalRule& rule, const Word& u, std::size_t n,
                              std::uint64_t cap) {
    const auto preds = predecessors(rule, u, n, cap);
    const std::size_t len = u.size() + 2 * rule.radius * n;
    MeasureEstimate est;
    est.word = u;
    est.time = n;
    est.method = MeasureMethod::ExactPredecessors;
    est.count = preds.size();
    est.total = checked_pow(rule.alphabet.size(), len, cap);
    est.value = Rational(static_cast<std::int64_t>(est.count), static_cast<std::int64_t>(est.total));
    return est;
}

LocalRule max_automaton() {
    LocalRule rule;
    rule.name = "max";
    rule.alphabet = Alphabet("01");
    rule.radius = 1;
    rule.transition = [](std::span<const Symbol> h) -> Symbol {
        return (h[0] | h[1] | h[2]) != 0 ? 1 : 0;
    };
    return rule;
}

LocalRule rule_fixture(const std::string& name) {
    if (name == "max") {
        return max_automaton();
    }
    throw ValidationError("rule", "unknown rule fixture '" + name + "'");
}

} // namespace mulimit
