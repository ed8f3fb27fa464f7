#pragma once

// The construction automaton. Two tiers:
//  * the counter layer is a finite radius-2 local rule on CellState (stars
//    spawn counters, equal-age counters meeting produce #);
//  * the segment layer (recognition probes, length computation, family
//    generation, fragment filling, merge cycle) is an emulation in which each
//    segment owns one virtual head that moves at most one cell per step and
//    writes only the cell under it. Controllers propose marks and writes,
//    which are committed together at the end of every step.

#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mulimit/cell_state.hpp"
#include "mulimit/generators.hpp"
#include "mulimit/rational.hpp"
#include "mulimit/symbolic.hpp"

namespace mulimit {

struct ConstructionParams {
    FamilySpec family;
    Rational inner_speed{1, 2};
    unsigned workspace_constant = 3;

    void validate() const;
};

/// ceil(2 / (1 - inner_speed)) + 4.
std::uint64_t counter_time_constant(const Rational& inner_speed);

/// Main alphabet of the construction: reserved glyphs ".#$&*" then the family outputs.
Alphabet construction_alphabet(const FamilySpec& family);

class CounterRule {
  public:
    static constexpr unsigned kRadius = 2;

    explicit CounterRule(Rational inner_speed = Rational(1, 2));

    /// New state of the centre cell of a 5-cell neighbourhood. Only the main
    /// symbol, tokens and phases are computed; marks are cleared where the
    /// main symbol stops being #, the other segment-layer fields are copied.
    CellState operator()(std::span<const CellState, 5> hood) const;

    /// Cyclic synchronous application. Cells whose neighbourhood carries no
    /// token and no star are copied unchanged.
    std::vector<CellState> step(const std::vector<CellState>& cells) const;

    Rational inner_speed() const noexcept { return Rational(p_, q_); }

  private:
    std::uint8_t p_;
    std::uint8_t q_;
};

CounterRule counter_rule(Rational inner_speed = Rational(1, 2));

struct LayoutSymbols {
    Symbol blank = kBlank;
    Symbol sep1 = kSep1;
    Symbol sep2 = kSep2;
};

/// Content of the n interior cells after filling with w_1..w_k, or nullopt
/// when k = 0 (nothing is written).
std::optional<Word> fragment_layout(std::size_t n, std::span<const Word> words,
                                    const LayoutSymbols& sym = {});

enum class Phase { Forming, Conscious, Computing, Filling, CycleLeft, CycleRight, Merged };
enum class ComputeStage { Rewind, Measure, Generate };

const char* phase_name(Phase p);

struct SegmentController {
    std::uint64_t id = 0;
    std::size_t left = 0;  // position of the left #
    std::size_t right = 0; // position of the right #
    std::size_t n = 0;     // cells strictly between them
    Phase phase = Phase::Forming;
    ComputeStage stage = ComputeStage::Measure;
    bool crossing = false;   // inside CycleLeft/CycleRight: the n-step crossing
    std::uint64_t timer = 0; // steps remaining in the current phase part
    std::size_t head = 0;    // offset from the left # (0 .. n+1)
    std::uint64_t conscious_time = 0;
    std::optional<std::uint64_t> first_l_onset;
    std::size_t k = 0;
    std::vector<Word> words; // w_1..w_k over the main alphabet
    std::uint64_t peak_workspace = 0;
};

/// Cells strictly between left and right going rightwards (N-1 when equal).
std::size_t segment_length(std::size_t left, std::size_t right, std::size_t N);

/// 2(n^2 + n); the degenerate n = 0 cycle uses one-step waits and lasts 2.
std::uint64_t cycle_period(std::size_t n);

/// Workspace width while storing n or the n^2 timer: min(n, 2 floor(log2 n) + 2).
std::size_t scratch_width(std::size_t n);

struct SharpEvent {
    std::uint64_t time = 0;
    std::size_t position = 0;
    std::size_t partner_distance = 0;
};

struct PhaseEvent {
    std::uint64_t time = 0;
    std::uint64_t controller = 0;
    std::size_t left = 0;
    std::size_t right = 0;
    std::size_t n = 0;
    Phase phase = Phase::Forming;
};

struct MergeEvent {
    std::uint64_t time = 0;
    std::size_t position = 0; // the erased #
    std::size_t n_left = 0;
    std::size_t n_right = 0;
};

class Construction {
  public:
    Construction(ConstructionParams params, std::vector<CellState> initial);

    /// Main layer from `window`, every other layer empty.
    static Construction from_window(ConstructionParams params, const CyclicWindow& window);

    /// Sample the main layer i.i.d.: '*' with probability star_density, the
    /// other main symbols uniform.
    static Construction sampled(ConstructionParams params, std::size_t N, std::uint64_t seed,
                                double star_density, std::uint64_t stream = 0);

    void advance();
    void run(std::uint64_t steps);

    CyclicWindow snapshot() const { return project(); }
    CyclicWindow project() const;
    const std::vector<CellState>& cells() const noexcept { return cells_; }
    std::uint64_t time() const noexcept { return time_; }
    std::size_t size() const noexcept { return cells_.size(); }
    const Alphabet& alphabet() const noexcept { return alphabet_; }
    const ConstructionParams& params() const noexcept { return params_; }
    std::uint64_t counter_time_constant() const noexcept { return kc_; }

    const std::vector<SegmentController>& controllers() const noexcept { return controllers_; }
    const SegmentController* controller_with_left(std::size_t left) const;

    /// Creation events with partner distance = cyclic distance to the nearest
    /// other created # (N if there is none).
    std::vector<SharpEvent> sharp_events() const;
    const std::vector<PhaseEvent>& phase_events() const noexcept { return phase_events_; }
    const std::vector<MergeEvent>& merge_events() const noexcept { return merge_events_; }
    /// L-mark onsets of the controller with the given id.
    std::vector<std::uint64_t> l_onsets(std::uint64_t controller) const;
    /// First time at which no counter token and no star remained.
    std::optional<std::uint64_t> quiescence_time() const noexcept { return quiescent_at_; }
    /// Largest (compute cells - bound) seen for any controller; <= 0 when the
    /// workspace bound C*floor(log2 n) + 1 always held.
    std::int64_t worst_workspace_slack() const noexcept { return worst_slack_; }

    /// Scripting: declare the segment between two existing # conscious now.
    void inject_conscious_segment(std::size_t left, std::size_t right);

  private:
    struct Probe {
        std::size_t pos;
        std::size_t origin;
        int dir;
    };
    struct FamilyWork {
        std::vector<Word> words;
        std::uint64_t steps = 0;
    };

    void apply_merges();
    void dissolve_broken();
    void advance_probes(const std::vector<std::size_t>& new_sharps);
    void make_conscious(std::size_t left, std::size_t right);
    void step_controller(SegmentController& c);
    void enter(SegmentController& c, Phase p);
    void begin_generate(SegmentController& c);
    const FamilyWork& family_work(std::size_t n);
    void commit();
    std::size_t flag_compute(const SegmentController& c);
    std::size_t at(const SegmentController& c, std::size_t offset) const;
    std::size_t wrap(std::int64_t i) const;

    ConstructionParams params_;
    Alphabet alphabet_;
    std::vector<std::vector<Symbol>> member_maps_; // member glyph index -> main symbol
    CounterRule rule_;
    std::uint64_t kc_;
    std::vector<CellState> cells_;
    std::uint64_t time_ = 0;
    std::uint64_t next_id_ = 1;
    std::vector<SegmentController> controllers_;
    std::vector<Probe> probes_;
    std::map<std::size_t, std::size_t> right_probe_hit_; // origin -> reached #
    std::map<std::size_t, std::size_t> left_probe_hit_;
    std::map<std::size_t, FamilyWork> family_cache_;
    std::vector<std::pair<std::size_t, Symbol>> pending_writes_;
    std::vector<SharpEvent> sharp_events_;
    std::vector<PhaseEvent> phase_events_;
    std::vector<MergeEvent> merge_events_;
    std::optional<std::uint64_t> quiescent_at_;
    bool counters_active_ = true;
    std::int64_t worst_slack_ = std::numeric_limits<std::int64_t>::min();
};

} // namespace mulimit
