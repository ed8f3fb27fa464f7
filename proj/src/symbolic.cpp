#include "mulimit/symbolic.hpp"

#include <algorithm>

#include "mulimit/errors.hpp"

namespace mulimit {

Alphabet::Alphabet(std::string glyphs) : glyphs_(std::move(glyphs)) {
    std::string sorted = glyphs_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ValidationError("alphabet", "duplicate symbol in \"" + glyphs_ + "\"");
    }
}

char Alphabet::glyph(Symbol s) const {
    if (s >= glyphs_.size()) {
        throw ContractViolation("symbol index " + std::to_string(s) + " outside alphabet");
    }
    return glyphs_[s];
}

bool Alphabet::contains(char glyph) const noexcept {
    return glyphs_.find(glyph) != std::string::npos;
}

Symbol Alphabet::index_of(char glyph) const {
    const auto pos = glyphs_.find(glyph);
    if (pos == std::string::npos) {
        throw ContractViolation(std::string("symbol '") + glyph + "' not in alphabet \"" +
                                glyphs_ + "\"");
    }
    return static_cast<Symbol>(pos);
}

Word Alphabet::parse(std::string_view text) const {
    std::vector<Symbol> out;
    out.reserve(text.size());
    for (char ch : text) {
        out.push_back(index_of(ch));
    }
    return Word(std::move(out));
}

std::string Alphabet::render(const Word& w) const {
    std::string out;
    out.reserve(w.size());
    for (Symbol s : w) {
        out.push_back(glyph(s));
    }
    return out;
}

bool Word::is_prefix_of(const Word& other) const {
    return size() <= other.size() && std::equal(begin(), end(), other.begin());
}

CyclicWindow::CyclicWindow(std::vector<Symbol> cells) : cells_(std::move(cells)) {
    if (cells_.empty()) {
        throw ContractViolation("cyclic window must have at least one cell");
    }
}

CyclicWindow CyclicWindow::rotated(std::int64_t k) const {
    std::vector<Symbol> out(cells_.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = at(static_cast<std::int64_t>(i) + k);
    }
    return CyclicWindow(std::move(out));
}

std::uint64_t count_occurrences(const Word& u, const Word& v) {
    if (v.size() > u.size()) {
        throw ContractViolation("count_occurrences: |v| > |u|");
    }
    std::uint64_t count = 0;
    const auto hay = u.view();
    const auto needle = v.view();
    for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
        if (std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<std::ptrdiff_t>(i))) {
            ++count;
        }
    }
    return count;
}

Rational word_density(const Word& u, const Word& v) {
    if (v.size() >= u.size()) {
        throw ContractViolation("word_density: requires |v| < |u|");
    }
    return Rational(static_cast<std::int64_t>(count_occurrences(u, v)),
                    static_cast<std::int64_t>(u.size() - v.size()));
}

std::uint64_t cyclic_occurrences(const CyclicWindow& c, const Word& v) {
    const std::size_t n = c.size();
    if (v.size() > n) {
        throw ContractViolation("window_density: |v| > N");
    }
    const auto cells = c.view();
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t j = 0;
        std::size_t pos = i;
        for (; j < v.size(); ++j) {
            if (cells[pos] != v[j]) {
                break;
            }
            if (++pos == n) {
                pos = 0;
            }
        }
        if (j == v.size()) {
            ++count;
        }
    }
    return count;
}

Rational window_density(const CyclicWindow& c, const Word& v) {
    return Rational(static_cast<std::int64_t>(cyclic_occurrences(c, v)),
                    static_cast<std::int64_t>(c.size()));
}

Rational set_density(const CyclicWindow& c, std::span<const Word> words) {
    Rational total;
    for (const Word& w : words) {
        total += window_density(c, w);
    }
    return total;
}

} // namespace mulimit
