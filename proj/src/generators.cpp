#include "mulimit/generators.hpp"

#include <algorithm>
#include <bit>

#include "mulimit/errors.hpp"

namespace mulimit {

std::uint64_t floor_log2(std::uint64_t x) {
    if (x == 0) {
        throw ContractViolation("floor_log2(0)");
    }
    return static_cast<std::uint64_t>(std::bit_width(x) - 1);
}

EmitResult GeneratorMachine::emit_next(std::uint64_t step_budget) {
    EmitResult result;
    while (result.steps < step_budget) {
        ++result.steps;
        ++steps_used_;
        auto s = work();
        cells_used_ = std::max(cells_used_, retained_cells());
        if (s) {
            emitted_.push_back(*s);
            result.symbol = s;
            return result;
        }
    }
    return result;
}

namespace {

// Fixed point a.r.s(r).s^2(r)... where s(a) = a.r: after the seed, level L
// emits s^L(r) by depth-first expansion with a stack of depth L + 1.
class SubstitutionGenerator final : public GeneratorMachine {
  public:
    explicit SubstitutionGenerator(const SubstitutionSpec& spec)
        : GeneratorMachine(spec.alphabet), images_(spec.images), seed_(spec.seed) {
        const Word& first = images_[seed_];
        rest_ = Word(std::vector<Symbol>(first.begin() + 1, first.end()));
    }

    std::unique_ptr<GeneratorMachine> clone() const override {
        return std::make_unique<SubstitutionGenerator>(*this);
    }

  protected:
    std::optional<Symbol> work() override {
        if (!seed_written_) {
            seed_written_ = true;
            return seed_;
        }
        if (stack_.empty()) {
            stack_.push_back({&rest_, 0, level_});
            ++level_;
            return std::nullopt;
        }
        Frame& top = stack_.back();
        if (top.index == top.word->size()) {
            stack_.pop_back();
            return std::nullopt;
        }
        const Symbol s = (*top.word)[top.index++];
        if (top.depth == 0) {
            return s;
        }
        const std::uint64_t depth = top.depth - 1;
        stack_.push_back({&images_[s], 0, depth});
        return std::nullopt;
    }

    std::uint64_t retained_cells() const override { return stack_.size() + 1; }

  private:
    struct Frame {
        const Word* word;
        std::size_t index;
        std::uint64_t depth;
    };

    // Frames point into images_/rest_, so copies must rebase them.
  public:
    SubstitutionGenerator(const SubstitutionGenerator& o)
        : GeneratorMachine(o), images_(o.images_), rest_(o.rest_), seed_(o.seed_),
          seed_written_(o.seed_written_), level_(o.level_) {
        for (const Frame& f : o.stack_) {
            const Word* w = f.word == &o.rest_
                                ? &rest_
                                : &images_[static_cast<std::size_t>(f.word - o.images_.data())];
            stack_.push_back({w, f.index, f.depth});
        }
    }

  private:
    std::vector<Word> images_;
    Word rest_;
    Symbol seed_;
    bool seed_written_ = false;
    std::uint64_t level_ = 0;
    std::vector<Frame> stack_;
};

// For k = 1, 2, ...: the labels of all closed walks of length k through the
// start state, in lexicographic label order, skipping walks that merely repeat
// a shorter closed walk through the start state. A round with no primitive label at all is rerun
// emitting every closed walk, so a graph such as a single loop still yields an
// infinite stream.
class SoficGenerator final : public GeneratorMachine {
  public:
    explicit SoficGenerator(const SoficSpec& spec)
        : GeneratorMachine(spec.alphabet), start_(spec.start), out_(spec.states.size()) {
        for (const LabeledEdge& e : spec.edges) {
            out_[e.from].push_back(e);
        }
        for (auto& edges : out_) {
            std::sort(edges.begin(), edges.end(),
                      [](const LabeledEdge& a, const LabeledEdge& b) { return a.label < b.label; });
        }
    }

    std::unique_ptr<GeneratorMachine> clone() const override {
        return std::make_unique<SoficGenerator>(*this);
    }

  protected:
    std::optional<Symbol> work() override {
        if (pending_pos_ < pending_.size()) {
            return pending_[pending_pos_++];
        }
        if (stack_.empty()) {
            if (length_ > 0 && !round_emitted_ && !emit_all_) {
                emit_all_ = true;
            } else {
                emit_all_ = false;
                ++length_;
            }
            round_emitted_ = false;
            stack_.push_back({start_, 0, 0});
            return std::nullopt;
        }
        Frame& top = stack_.back();
        const std::size_t depth = stack_.size() - 1;
        if (depth == length_) {
            if (top.state == start_) {
                std::vector<Symbol> label;
                label.reserve(length_);
                for (std::size_t i = 1; i < stack_.size(); ++i) {
                    label.push_back(stack_[i].label);
                }
                if (emit_all_ || !repeats_shorter_walk(label)) {
                    pending_ = std::move(label);
                    pending_pos_ = 0;
                    round_emitted_ = true;
                }
            }
            stack_.pop_back();
            return std::nullopt;
        }
        const auto& edges = out_[top.state];
        if (top.next < edges.size()) {
            const LabeledEdge& e = edges[top.next++];
            stack_.push_back({e.to, 0, e.label});
            return std::nullopt;
        }
        stack_.pop_back();
        return std::nullopt;
    }

    std::uint64_t retained_cells() const override { return length_ + 1; }

    bool repeats_shorter_walk(const std::vector<Symbol>& label) const {
        const std::size_t k = label.size();
        for (std::size_t d = 1; d < k; ++d) {
            if (k % d != 0 || stack_[d].state != start_) {
                continue;
            }
            bool periodic = true;
            for (std::size_t i = d; i < k && periodic; ++i) {
                periodic = label[i] == label[i - d];
            }
            if (periodic) {
                return true;
            }
        }
        return false;
    }

  private:
    struct Frame {
        std::size_t state;
        std::size_t next;
        Symbol label; // label of the edge entering this frame
    };

    std::size_t start_;
    std::vector<std::vector<LabeledEdge>> out_;
    std::vector<Frame> stack_;
    std::uint64_t length_ = 0;
    bool emit_all_ = false;
    bool round_emitted_ = false;
    std::vector<Symbol> pending_;
    std::size_t pending_pos_ = 0;
};

std::vector<std::vector<bool>> bool_product(const std::vector<std::vector<bool>>& a,
                                            const std::vector<std::vector<bool>>& b) {
    const std::size_t n = a.size();
    std::vector<std::vector<bool>> c(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            if (!a[i][k]) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                if (b[k][j]) {
                    c[i][j] = true;
                }
            }
        }
    }
    return c;
}

bool all_true(const std::vector<std::vector<bool>>& m) {
    return std::all_of(m.begin(), m.end(), [](const auto& row) {
        return std::all_of(row.begin(), row.end(), [](bool b) { return b; });
    });
}

} // namespace

void SubstitutionSpec::validate() const {
    const std::size_t q = alphabet.size();
    if (q == 0) {
        throw ValidationError("alphabet", "empty");
    }
    if (images.size() != q) {
        throw ValidationError("rules", "need exactly one image per symbol");
    }
    if (seed >= q) {
        throw ValidationError("seed", "not in alphabet");
    }
    for (std::size_t a = 0; a < q; ++a) {
        if (images[a].empty()) {
            throw ValidationError("rules", std::string("empty image for '") + alphabet.glyph(static_cast<Symbol>(a)) + "'");
        }
        for (Symbol s : images[a]) {
            if (s >= q) {
                throw ValidationError("rules", "image symbol outside alphabet");
            }
        }
    }
    const Word& seed_image = images[seed];
    if (seed_image[0] != seed) {
        throw ValidationError("seed", "image of the seed must start with the seed");
    }
    if (seed_image.size() < 2) {
        throw ValidationError("seed", "image of the seed must be longer than one symbol");
    }
    // Primitive: some power of the incidence matrix is strictly positive.
    // Wielandt's bound (q-1)^2 + 1 limits how far we need to look.
    std::vector<std::vector<bool>> m(q, std::vector<bool>(q, false));
    for (std::size_t a = 0; a < q; ++a) {
        for (Symbol b : images[a]) {
            m[a][b] = true;
        }
    }
    auto power = m;
    const std::size_t bound = (q - 1) * (q - 1) + 1;
    for (std::size_t i = 1; i <= bound; ++i) {
        if (all_true(power)) {
            return;
        }
        power = bool_product(power, m);
    }
    throw ValidationError("rules", "substitution is not primitive");
}

void SoficSpec::validate() const {
    const std::size_t n = states.size();
    if (n == 0) {
        throw ValidationError("states", "empty");
    }
    if (start >= n) {
        throw ValidationError("start", "unknown state");
    }
    if (edges.empty()) {
        throw ValidationError("edges", "empty");
    }
    std::vector<std::vector<bool>> seen_label(n, std::vector<bool>(alphabet.size(), false));
    std::vector<std::vector<std::size_t>> fwd(n), bwd(n);
    for (const LabeledEdge& e : edges) {
        if (e.from >= n || e.to >= n) {
            throw ValidationError("edges", "unknown state");
        }
        if (e.label >= alphabet.size()) {
            throw ValidationError("edges", "label outside alphabet");
        }
        if (seen_label[e.from][e.label]) {
            throw ValidationError("edges", "state '" + states[e.from] +
                                               "' has two edges with the same label");
        }
        seen_label[e.from][e.label] = true;
        fwd[e.from].push_back(e.to);
        bwd[e.to].push_back(e.from);
    }
    auto reach_all = [n, this](const std::vector<std::vector<std::size_t>>& adj) {
        std::vector<bool> seen(n, false);
        std::vector<std::size_t> todo{start};
        seen[start] = true;
        while (!todo.empty()) {
            const std::size_t s = todo.back();
            todo.pop_back();
            for (std::size_t t : adj[s]) {
                if (!seen[t]) {
                    seen[t] = true;
                    todo.push_back(t);
                }
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
    };
    if (!reach_all(fwd) || !reach_all(bwd)) {
        throw ValidationError("edges", "graph is not strongly connected");
    }
}

void FamilySpec::validate() const {
    if (members.empty()) {
        throw ValidationError("family", "needs at least one member");
    }
    for (const auto& m : members) {
        std::visit([](const auto& spec) { spec.validate(); }, m);
    }
}

std::string FamilySpec::output_glyphs() const {
    std::string out;
    for (const auto& m : members) {
        const Alphabet& a = std::visit([](const auto& spec) -> const Alphabet& { return spec.alphabet; }, m);
        for (char c : a.glyphs()) {
            if (out.find(c) == std::string::npos) {
                out.push_back(c);
            }
        }
    }
    return out;
}

bool operator==(const SubstitutionSpec& a, const SubstitutionSpec& b) {
    return a.alphabet == b.alphabet && a.images == b.images && a.seed == b.seed;
}

bool operator==(const SoficSpec& a, const SoficSpec& b) {
    return a.alphabet == b.alphabet && a.states == b.states && a.edges == b.edges &&
           a.start == b.start;
}

bool operator==(const FamilySpec& a, const FamilySpec& b) { return a.members == b.members; }

std::unique_ptr<GeneratorMachine> substitution_stream(const SubstitutionSpec& spec) {
    spec.validate();
    return std::make_unique<SubstitutionGenerator>(spec);
}

std::unique_ptr<GeneratorMachine> sofic_generic_stream(const SoficSpec& spec) {
    spec.validate();
    return std::make_unique<SoficGenerator>(spec);
}

std::unique_ptr<GeneratorMachine> make_generator(const SubshiftSpec& spec) {
    if (const auto* sub = std::get_if<SubstitutionSpec>(&spec)) {
        return substitution_stream(*sub);
    }
    return sofic_generic_stream(std::get<SoficSpec>(spec));
}

std::uint64_t description_size(const SubshiftSpec& spec) {
    if (const auto* sub = std::get_if<SubstitutionSpec>(&spec)) {
        std::uint64_t total = 1;
        for (const Word& w : sub->images) {
            total += w.size() + 1;
        }
        return total;
    }
    const auto& sofic = std::get<SoficSpec>(spec);
    return 1 + sofic.states.size() + 3 * sofic.edges.size();
}

std::size_t family_capacity(std::size_t family_size, std::uint64_t space_budget) {
    if (space_budget < 2) {
        return 0;
    }
    return static_cast<std::size_t>(
        std::min<std::uint64_t>(family_size, floor_log2(space_budget)));
}

std::vector<std::unique_ptr<GeneratorMachine>> enumerate_family(const FamilySpec& family,
                                                                std::uint64_t space_budget) {
    if (space_budget < 1) {
        throw ContractViolation("enumerate_family: space_budget must be >= 1");
    }
    const std::size_t k = family_capacity(family.members.size(), space_budget);
    std::vector<std::unique_ptr<GeneratorMachine>> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        out.push_back(make_generator(family.members[i]));
    }
    return out;
}

SubstitutionSpec fibonacci_substitution() {
    SubstitutionSpec spec;
    spec.alphabet = Alphabet("ab");
    spec.images = {spec.alphabet.parse("ab"), spec.alphabet.parse("a")};
    spec.seed = 0;
    return spec;
}

SubstitutionSpec thue_morse_substitution() {
    SubstitutionSpec spec;
    spec.alphabet = Alphabet("ab");
    spec.images = {spec.alphabet.parse("ab"), spec.alphabet.parse("ba")};
    spec.seed = 0;
    return spec;
}

SoficSpec even_shift() {
    SoficSpec spec;
    spec.alphabet = Alphabet("01");
    spec.states = {"p", "q"};
    spec.edges = {{0, 0, 0}, {0, 1, 1}, {1, 1, 0}};
    spec.start = 0;
    return spec;
}

} // namespace mulimit
