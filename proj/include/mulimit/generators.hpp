#pragma once

// Write-once generator machines. A generator emits, one symbol at a time, a
// prefix of a generic configuration of a subshift: substitution fixed points
// and concatenated cycle labels of a strongly connected graph. Work is metered
// in unit steps so a segment can run a generator under a step or space budget.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mulimit/symbolic.hpp"

namespace mulimit {

struct EmitResult {
    std::optional<Symbol> symbol; // empty: budget exhausted, progress kept
    std::uint64_t steps = 0;      // steps consumed by this call
};

class GeneratorMachine {
  public:
    explicit GeneratorMachine(Alphabet output) : output_(std::move(output)) {}
    virtual ~GeneratorMachine() = default;
    GeneratorMachine(const GeneratorMachine&) = default;
    GeneratorMachine& operator=(const GeneratorMachine&) = delete;

    /// Runs until one more symbol is written or `step_budget` steps are spent.
    EmitResult emit_next(std::uint64_t step_budget);

    const Alphabet& output_alphabet() const noexcept { return output_; }
    const Word& emitted() const noexcept { return emitted_; }
    std::uint64_t steps_used() const noexcept { return steps_used_; }
    /// Peak number of retained work cells (not counting the emitted prefix).
    std::uint64_t cells_used() const noexcept { return cells_used_; }

    virtual std::unique_ptr<GeneratorMachine> clone() const = 0;

  protected:
    /// One unit of work. Returns a symbol when this step writes one.
    virtual std::optional<Symbol> work() = 0;
    virtual std::uint64_t retained_cells() const = 0;

  private:
    Alphabet output_;
    Word emitted_;
    std::uint64_t steps_used_ = 0;
    std::uint64_t cells_used_ = 0;
};

/// A primitive substitution given as one image word per symbol, plus the seed
/// whose image starts with itself.
struct SubstitutionSpec {
    Alphabet alphabet;
    std::vector<Word> images;
    Symbol seed = 0;

    void validate() const;
};

struct LabeledEdge {
    std::size_t from = 0;
    Symbol label = 0;
    std::size_t to = 0;
    friend bool operator==(const LabeledEdge&, const LabeledEdge&) = default;
};

/// Strongly connected, deterministically labeled graph presenting a transitive
/// sofic shift.
struct SoficSpec {
    Alphabet alphabet;
    std::vector<std::string> states;
    std::vector<LabeledEdge> edges;
    std::size_t start = 0;

    void validate() const;
};

using SubshiftSpec = std::variant<SubstitutionSpec, SoficSpec>;

struct FamilySpec {
    std::vector<SubshiftSpec> members;

    void validate() const;
    /// Union of the member output glyphs, in order of first appearance.
    std::string output_glyphs() const;
};

bool operator==(const SubstitutionSpec& a, const SubstitutionSpec& b);
bool operator==(const SoficSpec& a, const SoficSpec& b);
bool operator==(const FamilySpec& a, const FamilySpec& b);

std::unique_ptr<GeneratorMachine> substitution_stream(const SubstitutionSpec& spec);
std::unique_ptr<GeneratorMachine> sofic_generic_stream(const SoficSpec& spec);
std::unique_ptr<GeneratorMachine> make_generator(const SubshiftSpec& spec);

/// Description size of a member, charged as enumeration steps.
std::uint64_t description_size(const SubshiftSpec& spec);

/// Number of machines a workspace of `space_budget` cells can host:
/// min(family_size, floor(log2 space_budget)), 0 for space_budget <= 1.
std::size_t family_capacity(std::size_t family_size, std::uint64_t space_budget);

/// The first k members instantiated as fresh generators.
std::vector<std::unique_ptr<GeneratorMachine>> enumerate_family(const FamilySpec& family,
                                                                std::uint64_t space_budget);

// Fixtures used by tests and the default configs.
SubstitutionSpec fibonacci_substitution();
SubstitutionSpec thue_morse_substitution();
SoficSpec even_shift();

std::uint64_t floor_log2(std::uint64_t x); // x >= 1

} // namespace mulimit
