#pragma once

// One-dimensional cellular automata on cyclic windows, Bernoulli sampling, and
// the exact predecessor oracle. Simulation is cyclic; the predecessor oracle
// works on plain words, where each application shrinks the word by 2r.

#include <concepts>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mulimit/rational.hpp"
#include "mulimit/rng.hpp"
#include "mulimit/symbolic.hpp"

namespace mulimit {

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 24;
inline constexpr char kStarGlyph = '*';

struct LocalRule {
    std::string name;
    Alphabet alphabet;
    unsigned radius = 1;
    /// Receives the 2r+1 neighborhood symbols, leftmost first.
    std::function<Symbol(std::span<const Symbol>)> transition;

    Symbol operator()(std::span<const Symbol> neighborhood) const {
        return transition(neighborhood);
    }
};

/// One synchronous cyclic update. Requires N >= 2r+1 and every cell in the alphabet.
CyclicWindow step(const LocalRule& rule, const CyclicWindow& c);

/// One non-cyclic application to a word: the result has length |v| - 2r.
Word apply_to_word(const LocalRule& rule, const Word& v);

struct SpaceTimeRecord {
    std::vector<CyclicWindow> rows; // rows[t] is the main layer at time t
    std::string rule;
    std::uint64_t seed = 0;
    std::size_t N = 0;
    std::size_t T = 0;
    std::string rng_algorithm = kRngAlgorithm;
};

/// Anything that can be observed and advanced one step at a time.
template <typename E>
concept Evolver = requires(E& e, const E& ce) {
    { ce.snapshot() } -> std::convertible_to<CyclicWindow>;
    e.advance();
};

template <Evolver E>
SpaceTimeRecord record_run(E& evolver, std::size_t T, std::string rule_name, std::uint64_t seed) {
    SpaceTimeRecord rec;
    rec.rule = std::move(rule_name);
    rec.seed = seed;
    rec.T = T;
    rec.rows.reserve(T + 1);
    rec.rows.push_back(evolver.snapshot());
    rec.N = rec.rows.front().size();
    for (std::size_t t = 0; t < T; ++t) {
        evolver.advance();
        rec.rows.push_back(evolver.snapshot());
    }
    return rec;
}

SpaceTimeRecord run(const LocalRule& rule, const CyclicWindow& c, std::size_t T,
                    std::uint64_t seed = 0);

/// Independent cells. With star_density s > 0 the symbol '*' of the alphabet
/// has probability s and the rest is uniform over the other symbols; with s = 0
/// every symbol except '*' is equally likely ('*' itself is never drawn).
CyclicWindow sample_window(const Alphabet& alphabet, std::size_t N, std::uint64_t seed,
                           double star_density = 0.0, std::uint64_t stream = 0);

/// All words v of length |u| + 2rn whose n-fold word application is u, in
/// lexicographic order.
std::vector<Word> predecessors(const LocalRule& rule, const Word& u, std::size_t n,
                               std::uint64_t cap = kDefaultEnumerationCap);

enum class MeasureMethod { ExactPredecessors, MonteCarlo };

struct MeasureEstimate {
    Word word;
    std::size_t time = 0;
    Rational value;
    MeasureMethod method = MeasureMethod::ExactPredecessors;
    std::uint64_t count = 0;  // |P^n(u)| for the exact method
    std::uint64_t total = 0;  // |Q|^{|u|+2rn}
    std::uint64_t trials = 0; // Monte-Carlo only
};

MeasureEstimate exact_measure(const LocalRule& rule, const Word& u, std::size_t n,
                              std::uint64_t cap = kDefaultEnumerationCap);

/// Binary alphabet, radius 1, delta(a,b,c) = 0 iff a = b = c = 0.
LocalRule max_automaton();

/// Looks up a rule fixture by name ("max").
LocalRule rule_fixture(const std::string& name);

} // namespace mulimit
