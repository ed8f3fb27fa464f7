#pragma once

// Words, cyclic windows and the occurrence/density functions used everywhere
// else in the library. Symbols are small integer indices into an Alphabet;
// each symbol also has a one-character glyph so words can be written as
// plain strings in tests and config files.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mulimit/rational.hpp"

namespace mulimit {

using Symbol = std::uint32_t;

class Word;

class Alphabet {
  public:
    Alphabet() = default;
    /// Each character of `glyphs` is one symbol; index i <-> glyphs[i].
    explicit Alphabet(std::string glyphs);

    std::size_t size() const noexcept { return glyphs_.size(); }
    char glyph(Symbol s) const;
    bool contains(char glyph) const noexcept;
    Symbol index_of(char glyph) const;
    const std::string& glyphs() const noexcept { return glyphs_; }

    Word parse(std::string_view text) const;
    std::string render(const Word& w) const;

    friend bool operator==(const Alphabet&, const Alphabet&) = default;

  private:
    std::string glyphs_;
};

class Word {
  public:
    Word() = default;
    explicit Word(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {}
    Word(std::initializer_list<Symbol> symbols) : symbols_(symbols) {}
    Word(std::size_t length, Symbol fill) : symbols_(length, fill) {}

    std::size_t size() const noexcept { return symbols_.size(); }
    bool empty() const noexcept { return symbols_.empty(); }
    Symbol operator[](std::size_t i) const { return symbols_[i]; }
    Symbol& operator[](std::size_t i) { return symbols_[i]; }
    void push_back(Symbol s) { symbols_.push_back(s); }

    std::span<const Symbol> view() const noexcept { return symbols_; }
    const std::vector<Symbol>& symbols() const noexcept { return symbols_; }
    auto begin() const noexcept { return symbols_.begin(); }
    auto end() const noexcept { return symbols_.end(); }

    bool is_prefix_of(const Word& other) const;

    friend bool operator==(const Word&, const Word&) = default;
    friend auto operator<=>(const Word&, const Word&) = default;

  private:
    std::vector<Symbol> symbols_;
};

/// Length-N circular sequence; all indexing is taken modulo N.
class CyclicWindow {
  public:
    CyclicWindow() = default;
    explicit CyclicWindow(std::vector<Symbol> cells);
    explicit CyclicWindow(const Word& w) : CyclicWindow(w.symbols()) {}

    std::size_t size() const noexcept { return cells_.size(); }
    Symbol at(std::int64_t i) const noexcept { return cells_[wrap(i)]; }
    Symbol& operator[](std::size_t i) { return cells_[i]; }
    Symbol operator[](std::size_t i) const { return cells_[i]; }
    std::size_t wrap(std::int64_t i) const noexcept {
        const auto n = static_cast<std::int64_t>(cells_.size());
        const std::int64_t r = i % n;
        return static_cast<std::size_t>(r < 0 ? r + n : r);
    }

    /// rotate(k)[i] == at(i + k)
    CyclicWindow rotated(std::int64_t k) const;
    std::span<const Symbol> view() const noexcept { return cells_; }
    const std::vector<Symbol>& cells() const noexcept { return cells_; }
    Word as_word() const { return Word(cells_); }

    friend bool operator==(const CyclicWindow&, const CyclicWindow&) = default;

  private:
    std::vector<Symbol> cells_;
};

/// |u|_v: occurrences of v in u over start positions 0..|u|-|v| (overlaps count).
std::uint64_t count_occurrences(const Word& u, const Word& v);

/// |u|_v / (|u| - |v|). Requires |v| < |u|; the result may exceed 1.
Rational word_density(const Word& u, const Word& v);

/// Occurrences of v over all N cyclic start positions, divided by N.
Rational window_density(const CyclicWindow& c, const Word& v);
std::uint64_t cyclic_occurrences(const CyclicWindow& c, const Word& v);

/// Sum of window densities of the (assumed distinct) members of W.
Rational set_density(const CyclicWindow& c, std::span<const Word> words);

} // namespace mulimit
