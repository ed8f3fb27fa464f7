#include "mulimit/construction.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "mulimit/ca_engine.hpp"
#include "mulimit/errors.hpp"

namespace mulimit {

// ---------------------------------------------------------------------------
// parameters

void ConstructionParams::validate() const {
    family.validate();
    const Rational zero(0);
    const Rational one(1);
    if (!(inner_speed > zero && inner_speed < one)) {
        throw ValidationError("inner_speed", "must lie strictly between 0 and 1");
    }
    if (inner_speed.den() > 4) {
        throw ValidationError("inner_speed", "denominator must be at most 4 (two phase bits)");
    }
    if (workspace_constant < 3) {
        throw ValidationError("workspace_constant", "must be at least 3");
    }
    const std::string glyphs = family.output_glyphs();
    for (char c : glyphs) {
        if (std::string(kReservedGlyphs).find(c) != std::string::npos) {
            throw ValidationError("alphabet", std::string("output glyph '") + c + "' is reserved");
        }
    }
    if (glyphs.size() + 5 > 64) {
        throw ValidationError("alphabet", "too many output symbols");
    }
}

std::uint64_t counter_time_constant(const Rational& inner_speed) {
    // 2 / (1 - p/q) = 2q / (q - p)
    const std::int64_t num = 2 * inner_speed.den();
    const std::int64_t den = inner_speed.den() - inner_speed.num();
    return static_cast<std::uint64_t>((num + den - 1) / den) + 4;
}

Alphabet construction_alphabet(const FamilySpec& family) {
    return Alphabet(std::string(kReservedGlyphs) + family.output_glyphs());
}

// ---------------------------------------------------------------------------
// counter layer

CounterRule::CounterRule(Rational inner_speed)
    : p_(static_cast<std::uint8_t>(inner_speed.num())),
      q_(static_cast<std::uint8_t>(inner_speed.den())) {
    if (!(inner_speed > Rational(0) && inner_speed < Rational(1)) || inner_speed.den() > 4) {
        throw ValidationError("inner_speed", "must be p/q in (0,1) with q <= 4");
    }
}

CounterRule counter_rule(Rational inner_speed) { return CounterRule(inner_speed); }

CellState CounterRule::operator()(std::span<const CellState, 5> hood) const {
    auto C = [&](int o) -> const CellState& { return hood[static_cast<std::size_t>(o + 2)]; };
    auto ORs = [&](int o) { return C(o).has(tok::OuterR) || C(o).main == kStar; };
    auto OLs = [&](int o) { return C(o).has(tok::OuterL) || C(o).main == kStar; };

    // An outer leaving cell y is absorbed when it meets an opposite outer,
    // either by swapping places or by landing on the same cell.
    auto or_moves = [&](int y) {
        return ORs(y) && !(OLs(y + 1) || (OLs(y + 2) && !ORs(y + 1) && !OLs(y + 1)));
    };
    auto ol_moves = [&](int y) {
        return OLs(y) && !(ORs(y - 1) || (ORs(y - 2) && !OLs(y - 1) && !ORs(y - 1)));
    };
    // Non-outer signals do not survive crossing an outer.
    auto kill_right = [&](int y) { return OLs(y) || OLs(y + 1); };
    auto kill_left = [&](int y) { return ORs(y) || ORs(y - 1); };

    auto anchored = [&](int y) { return C(y).has(tok::Anchors); };
    auto adv_r = [&](int y) {
        return C(y).has(tok::InnerR) && C(y).phase_r + p_ >= q_ && !anchored(y + 1);
    };
    auto adv_l = [&](int y) {
        return C(y).has(tok::InnerL) && C(y).phase_l + p_ >= q_ && !anchored(y - 1);
    };
    auto bounce_l = [&](int y) { return C(y).has(tok::InnerR) || C(y - 1).has(tok::InnerR); };
    auto bounce_r = [&](int y) { return C(y).has(tok::InnerL) || C(y + 1).has(tok::InnerL); };
    auto back_home_r = [&](int y) { return C(y).has(tok::AnchorE | tok::AnchorL); };
    auto back_home_l = [&](int y) { return C(y).has(tok::AnchorE | tok::AnchorR); };

    const CellState& me = C(0);
    const bool sharp_here = me.main == kSharp;

    const bool even_here = ORs(-1) && OLs(1) && !ORs(0) && !OLs(0);
    const bool odd_here = ORs(0) && OLs(1);  // collision between this cell and the next
    const bool odd_left = ORs(-1) && OLs(0); // collision between the previous cell and this one

    // Resolution at anchors.
    const bool cbr = me.has(tok::CmpBackR);
    const bool cbl = me.has(tok::CmpBackL);
    const bool anchor_e = me.has(tok::AnchorE);
    const bool anchor_l = me.has(tok::AnchorL);
    const bool anchor_r = me.has(tok::AnchorR);
    const bool partner_cbl = C(1).has(tok::CmpBackL);          // for an AnchorL here
    const bool partner_cbr = C(-1).has(tok::CmpBackR) && C(-1).has(tok::AnchorL); // for AnchorR
    const bool tie = (anchor_e && cbr && cbl) || (anchor_l && cbr && partner_cbl);

    CellState out = me;
    if (tie) {
        out.main = kSharp;
        out.tokens = 0;
        out.phase_r = 0;
        out.phase_l = 0;
        return out;
    }

    const bool emit_or = (anchor_e && cbr && !cbl) || (anchor_r && partner_cbr && !cbl);
    const bool emit_ol = (anchor_e && cbl && !cbr) || (anchor_l && partner_cbl && !cbr);

    std::uint16_t t = 0;
    std::uint8_t phase_r = 0;
    std::uint8_t phase_l = 0;

    const bool or_in = or_moves(-1);
    const bool ol_in = ol_moves(1);
    if (or_in || emit_or) {
        t |= tok::OuterR;
    }
    if (ol_in || emit_ol) {
        t |= tok::OuterL;
    }

    // inner signals
    if (me.main == kStar) {
        t |= tok::InnerR | tok::InnerL;
    } else if (!sharp_here) {
        if (me.has(tok::InnerR) && !adv_r(0) && !kill_right(0)) {
            t |= tok::InnerR;
            const unsigned ph = me.phase_r + p_;
            phase_r = static_cast<std::uint8_t>(ph >= q_ ? me.phase_r : ph);
        } else if (adv_r(-1) && !kill_right(-1)) {
            t |= tok::InnerR;
            phase_r = static_cast<std::uint8_t>(C(-1).phase_r + p_ - q_);
        }
        if (me.has(tok::InnerL) && !adv_l(0) && !kill_left(0)) {
            t |= tok::InnerL;
            const unsigned ph = me.phase_l + p_;
            phase_l = static_cast<std::uint8_t>(ph >= q_ ? me.phase_l : ph);
        } else if (adv_l(1) && !kill_left(1)) {
            t |= tok::InnerL;
            phase_l = static_cast<std::uint8_t>(C(1).phase_l + p_ - q_);
        }
    }

    // comparison signals
    if (even_here || odd_here) {
        t |= tok::CmpOutL;
    }
    if (even_here || odd_left) {
        t |= tok::CmpOutR;
    }
    if (!sharp_here) {
        if (C(1).has(tok::CmpOutL) && !bounce_l(1) && !kill_left(1)) {
            t |= tok::CmpOutL;
        }
        if (C(-1).has(tok::CmpOutR) && !bounce_r(-1) && !kill_right(-1)) {
            t |= tok::CmpOutR;
        }
        if ((me.has(tok::CmpOutL) && bounce_l(0) && !kill_left(0)) ||
            (C(-1).has(tok::CmpBackR) && !back_home_r(-1) && !kill_right(-1))) {
            t |= tok::CmpBackR;
        }
        if ((me.has(tok::CmpOutR) && bounce_r(0) && !kill_right(0)) ||
            (C(1).has(tok::CmpBackL) && !back_home_l(1) && !kill_left(1))) {
            t |= tok::CmpBackL;
        }
    }

    // anchors
    if (even_here || (anchor_e && !cbr && !cbl)) {
        t |= tok::AnchorE;
    }
    if (odd_here || (anchor_l && !cbr && !partner_cbl)) {
        t |= tok::AnchorL;
    }
    if (odd_left || (anchor_r && !partner_cbr && !cbl)) {
        t |= tok::AnchorR;
    }

    out.tokens = t;
    out.phase_r = (t & tok::InnerR) ? phase_r : 0;
    out.phase_l = (t & tok::InnerL) ? phase_l : 0;
    if (me.main == kStar || or_in || ol_in || even_here) {
        out.main = kBlank;
    }
    if (out.main != kSharp) {
        out.mark = MergeMark::None;
    }
    return out;
}

std::vector<CellState> CounterRule::step(const std::vector<CellState>& cells) const {
    const std::size_t n = cells.size();
    if (n < 2 * kRadius + 1) {
        throw ContractViolation("counter rule: window smaller than 5");
    }
    std::vector<std::uint8_t> active(n);
    for (std::size_t i = 0; i < n; ++i) {
        active[i] = (cells[i].tokens != 0 || cells[i].main == kStar) ? 1 : 0;
    }
    std::vector<CellState> out(cells);
    std::array<CellState, 5> hood;
    for (std::size_t i = 0; i < n; ++i) {
        bool any = false;
        for (std::size_t j = 0; j < 5 && !any; ++j) {
            any = active[(i + n + j - 2) % n] != 0;
        }
        if (!any) {
            continue;
        }
        for (std::size_t j = 0; j < 5; ++j) {
            hood[j] = cells[(i + n + j - 2) % n];
        }
        out[i] = (*this)(hood);
    }
    return out;
}

// ---------------------------------------------------------------------------
// fragment layout

std::optional<Word> fragment_layout(std::size_t n, std::span<const Word> words,
                                    const LayoutSymbols& sym) {
    const std::size_t k = words.size();
    if (k == 0) {
        return std::nullopt;
    }
    Word out(n, sym.blank);
    std::size_t f = 0;
    while ((f + 1) * (f + 1) <= n) {
        ++f;
    }
    for (std::size_t j = 1; j <= f; ++j) {
        const std::size_t base = (j - 1) * f;
        const std::size_t level = static_cast<std::size_t>(std::countr_zero(j)) + 1;
        const Word& w = words[std::min(level, k) - 1];
        const std::size_t interior = f - 1;
        if (!w.empty()) {
            const std::size_t copies = (interior + 1) / (w.size() + 1);
            std::size_t pos = base;
            for (std::size_t c = 0; c < copies; ++c) {
                if (c > 0) {
                    out[pos++] = sym.sep2;
                }
                for (Symbol s : w) {
                    out[pos++] = s;
                }
            }
        }
        out[base + f - 1] = sym.sep1;
    }
    return out;
}

// ---------------------------------------------------------------------------
// segment helpers

const char* phase_name(Phase p) {
    switch (p) {
    case Phase::Forming: return "Forming";
    case Phase::Conscious: return "Conscious";
    case Phase::Computing: return "Computing";
    case Phase::Filling: return "Filling";
    case Phase::CycleLeft: return "CycleLeft";
    case Phase::CycleRight: return "CycleRight";
    case Phase::Merged: return "Merged";
    }
    return "?";
}

std::size_t segment_length(std::size_t left, std::size_t right, std::size_t N) {
    if (left == right) {
        return N - 1;
    }
    return (right + N - left) % N - 1;
}

namespace {

std::uint64_t wait_steps(std::size_t n) {
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(n) * n);
}

std::size_t log2_or_zero(std::size_t n) {
    return n == 0 ? 0 : static_cast<std::size_t>(floor_log2(n));
}

std::size_t bit_length(std::uint64_t x) { return static_cast<std::size_t>(std::bit_width(x)); }

} // namespace

std::uint64_t cycle_period(std::size_t n) { return 2 * (wait_steps(n) + n); }

std::size_t scratch_width(std::size_t n) { return std::min(n, 2 * log2_or_zero(n) + 2); }

// ---------------------------------------------------------------------------
// Construction

Construction::Construction(ConstructionParams params, std::vector<CellState> initial)
    : params_(std::move(params)),
      alphabet_(construction_alphabet(params_.family)),
      rule_((params_.validate(), params_.inner_speed)),
      kc_(mulimit::counter_time_constant(params_.inner_speed)),
      cells_(std::move(initial)) {
    if (cells_.size() < 2 * CounterRule::kRadius + 1) {
        throw ContractViolation("construction: window must have at least 5 cells");
    }
    for (const CellState& c : cells_) {
        if (c.main >= alphabet_.size()) {
            throw ContractViolation("construction: main symbol outside the alphabet");
        }
    }
    for (const auto& m : params_.family.members) {
        const Alphabet& a =
            std::visit([](const auto& spec) -> const Alphabet& { return spec.alphabet; }, m);
        std::vector<Symbol> map;
        for (char g : a.glyphs()) {
            map.push_back(alphabet_.index_of(g));
        }
        member_maps_.push_back(std::move(map));
    }
    counters_active_ = std::any_of(cells_.begin(), cells_.end(), [](const CellState& c) {
        return c.tokens != 0 || c.main == kStar;
    });
    if (!counters_active_) {
        quiescent_at_ = 0;
    }
}

Construction Construction::from_window(ConstructionParams params, const CyclicWindow& window) {
    std::vector<CellState> cells(window.size());
    for (std::size_t i = 0; i < window.size(); ++i) {
        cells[i].main = window[i];
    }
    return Construction(std::move(params), std::move(cells));
}

Construction Construction::sampled(ConstructionParams params, std::size_t N, std::uint64_t seed,
                                   double star_density, std::uint64_t stream) {
    const Alphabet alphabet = construction_alphabet(params.family);
    return from_window(std::move(params), sample_window(alphabet, N, seed, star_density, stream));
}

CyclicWindow Construction::project() const {
    std::vector<Symbol> out(cells_.size());
    for (std::size_t i = 0; i < cells_.size(); ++i) {
        out[i] = cells_[i].main;
    }
    return CyclicWindow(std::move(out));
}

std::size_t Construction::wrap(std::int64_t i) const {
    const auto n = static_cast<std::int64_t>(cells_.size());
    const std::int64_t r = i % n;
    return static_cast<std::size_t>(r < 0 ? r + n : r);
}

std::size_t Construction::at(const SegmentController& c, std::size_t offset) const {
    return (c.left + offset) % cells_.size();
}

const SegmentController* Construction::controller_with_left(std::size_t left) const {
    for (const auto& c : controllers_) {
        if (c.left == left) {
            return &c;
        }
    }
    return nullptr;
}

void Construction::run(std::uint64_t steps) {
    for (std::uint64_t i = 0; i < steps; ++i) {
        advance();
    }
}

void Construction::advance() {
    apply_merges();

    std::vector<std::size_t> new_sharps;
    if (counters_active_) {
        std::vector<CellState> next = rule_.step(cells_);
        bool active = false;
        for (std::size_t i = 0; i < next.size(); ++i) {
            if (next[i].main == kSharp && cells_[i].main != kSharp) {
                new_sharps.push_back(i);
                sharp_events_.push_back({time_ + 1, i, 0});
            }
            active = active || next[i].tokens != 0 || next[i].main == kStar;
        }
        cells_ = std::move(next);
        if (!active) {
            counters_active_ = false;
            quiescent_at_ = time_ + 1;
        }
    }

    dissolve_broken();
    advance_probes(new_sharps);
    for (auto& c : controllers_) {
        step_controller(c);
    }
    commit();
    ++time_;
}

void Construction::apply_merges() {
    std::vector<std::size_t> shared;
    for (const auto& c : controllers_) {
        if (cells_[c.right].mark == MergeMark::Both) {
            shared.push_back(c.right);
        }
    }
    for (std::size_t s : shared) {
        auto a = std::find_if(controllers_.begin(), controllers_.end(),
                              [s](const SegmentController& c) { return c.right == s; });
        auto b = std::find_if(controllers_.begin(), controllers_.end(),
                              [s](const SegmentController& c) { return c.left == s; });
        if (a == controllers_.end() || b == controllers_.end() || a == b) {
            continue;
        }
        SegmentController merged;
        merged.id = next_id_++;
        merged.left = a->left;
        merged.right = b->right;
        merged.n = a->n + b->n + 1;
        merged.conscious_time = time_;
        merge_events_.push_back({time_, s, a->n, b->n});
        phase_events_.push_back({time_, a->id, a->left, a->right, a->n, Phase::Merged});
        phase_events_.push_back({time_, b->id, b->left, b->right, b->n, Phase::Merged});
        cells_[s].main = kBlank;
        cells_[s].mark = MergeMark::None;
        // The new head starts on the erased # and first walks back to the left #.
        merged.phase = Phase::Computing;
        merged.stage = ComputeStage::Rewind;
        merged.head = a->n + 1;
        merged.timer = merged.head;
        const std::uint64_t ida = a->id;
        const std::uint64_t idb = b->id;
        std::erase_if(controllers_, [&](const SegmentController& c) {
            return c.id == ida || c.id == idb;
        });
        phase_events_.push_back(
            {time_, merged.id, merged.left, merged.right, merged.n, Phase::Computing});
        controllers_.push_back(std::move(merged));
    }
    if (!shared.empty()) {
        std::sort(controllers_.begin(), controllers_.end(),
                  [](const SegmentController& x, const SegmentController& y) {
                      return x.left < y.left;
                  });
    }
}

void Construction::dissolve_broken() {
    std::erase_if(controllers_, [&](const SegmentController& c) {
        const bool broken = cells_[c.left].main != kSharp || cells_[c.right].main != kSharp;
        if (broken) {
            phase_events_.push_back({time_ + 1, c.id, c.left, c.right, c.n, Phase::Merged});
        }
        return broken;
    });
}

void Construction::advance_probes(const std::vector<std::size_t>& new_sharps) {
    std::vector<Probe> kept;
    kept.reserve(probes_.size() + 2 * new_sharps.size());
    std::vector<std::pair<std::size_t, std::size_t>> ready;
    for (Probe p : probes_) {
        if (cells_[p.origin].main != kSharp) {
            continue;
        }
        const std::size_t next = wrap(static_cast<std::int64_t>(p.pos) + p.dir);
        if (cells_[next].main == kSharp) {
            if (p.dir > 0) {
                right_probe_hit_[p.origin] = next;
                auto it = left_probe_hit_.find(next);
                if (it != left_probe_hit_.end() && it->second == p.origin) {
                    ready.emplace_back(p.origin, next);
                }
            } else {
                left_probe_hit_[p.origin] = next;
                auto it = right_probe_hit_.find(next);
                if (it != right_probe_hit_.end() && it->second == p.origin) {
                    ready.emplace_back(next, p.origin);
                }
            }
            continue;
        }
        const bool busy = cells_[p.pos].tokens != 0 || cells_[next].tokens != 0 ||
                          cells_[next].main == kStar;
        if (!busy) {
            p.pos = next;
        }
        kept.push_back(p);
    }
    for (std::size_t s : new_sharps) {
        kept.push_back({s, s, +1});
        kept.push_back({s, s, -1});
    }
    probes_ = std::move(kept);
    for (auto [l, r] : ready) {
        right_probe_hit_.erase(l);
        left_probe_hit_.erase(r);
        make_conscious(l, r);
    }
}

void Construction::make_conscious(std::size_t left, std::size_t right) {
    if (cells_[left].main != kSharp || cells_[right].main != kSharp) {
        return;
    }
    if (controller_with_left(left) != nullptr) {
        return;
    }
    SegmentController c;
    c.id = next_id_++;
    c.left = left;
    c.right = right;
    c.n = segment_length(left, right, cells_.size());
    c.phase = Phase::Conscious;
    c.timer = 1;
    c.conscious_time = time_ + 1;
    phase_events_.push_back({time_ + 1, c.id, c.left, c.right, c.n, Phase::Conscious});
    controllers_.push_back(std::move(c));
    std::sort(controllers_.begin(), controllers_.end(),
              [](const SegmentController& x, const SegmentController& y) { return x.left < y.left; });
}

void Construction::inject_conscious_segment(std::size_t left, std::size_t right) {
    if (left >= cells_.size() || right >= cells_.size() || cells_[left].main != kSharp ||
        cells_[right].main != kSharp) {
        throw ContractViolation("inject_conscious_segment: both ends must be #");
    }
    for (std::size_t i = (left + 1) % cells_.size(); i != right; i = (i + 1) % cells_.size()) {
        if (cells_[i].main == kSharp) {
            throw ContractViolation("inject_conscious_segment: # inside the segment");
        }
    }
    SegmentController c;
    c.id = next_id_++;
    c.left = left;
    c.right = right;
    c.n = segment_length(left, right, cells_.size());
    c.phase = Phase::Conscious;
    c.timer = 1;
    c.conscious_time = time_;
    phase_events_.push_back({time_, c.id, c.left, c.right, c.n, Phase::Conscious});
    controllers_.push_back(std::move(c));
    std::sort(controllers_.begin(), controllers_.end(),
              [](const SegmentController& x, const SegmentController& y) { return x.left < y.left; });
}

void Construction::enter(SegmentController& c, Phase p) {
    c.phase = p;
    phase_events_.push_back({time_ + 1, c.id, c.left, c.right, c.n, p});
}

const Construction::FamilyWork& Construction::family_work(std::size_t n) {
    const std::size_t space = log2_or_zero(n);
    auto it = family_cache_.find(space);
    if (it != family_cache_.end()) {
        return it->second;
    }
    FamilyWork work;
    const std::size_t k = family_capacity(params_.family.members.size(), space);
    if (k > 0) {
        const std::uint64_t per_machine = space / k;
        auto machines = enumerate_family(params_.family, space);
        for (std::size_t i = 0; i < k; ++i) {
            work.steps += description_size(params_.family.members[i]);
            GeneratorMachine& g = *machines[i];
            std::size_t kept = 0;
            while (g.emitted().size() < per_machine) {
                const EmitResult r = g.emit_next(std::uint64_t{1} << 32);
                work.steps += r.steps;
                if (!r.symbol || g.cells_used() > per_machine) {
                    break;
                }
                kept = g.emitted().size();
            }
            Word w;
            for (std::size_t j = 0; j < kept; ++j) {
                w.push_back(member_maps_[i][g.emitted()[j]]);
            }
            work.words.push_back(std::move(w));
        }
    }
    return family_cache_.emplace(space, std::move(work)).first->second;
}

void Construction::begin_generate(SegmentController& c) {
    const FamilyWork& work = family_work(c.n);
    c.k = work.words.size();
    c.words = work.words;
    c.stage = ComputeStage::Generate;
    c.head = c.n + 1;
    c.timer = std::max<std::uint64_t>(1, work.steps);
}

void Construction::step_controller(SegmentController& c) {
    auto start_cycle_left = [&] {
        enter(c, Phase::CycleLeft);
        c.crossing = false;
        c.head = 0;
        c.timer = wait_steps(c.n);
        if (!c.first_l_onset) {
            c.first_l_onset = time_ + 1;
        }
    };
    auto start_cycle_right = [&] {
        enter(c, Phase::CycleRight);
        c.crossing = false;
        c.head = c.n + 1;
        c.timer = wait_steps(c.n);
    };

    switch (c.phase) {
    case Phase::Conscious:
        if (--c.timer == 0) {
            enter(c, Phase::Computing);
            c.stage = ComputeStage::Measure;
            c.head = 0;
            c.timer = c.n + 1;
        }
        return;
    case Phase::Computing:
        switch (c.stage) {
        case ComputeStage::Rewind:
            if (c.timer > 0) {
                --c.head;
                --c.timer;
            }
            if (c.timer == 0) {
                c.stage = ComputeStage::Measure;
                c.head = 0;
                c.timer = c.n + 1;
            }
            return;
        case ComputeStage::Measure:
            ++c.head;
            if (--c.timer == 0) {
                begin_generate(c);
            }
            return;
        case ComputeStage::Generate:
            if (--c.timer == 0) {
                enter(c, Phase::Filling);
                c.head = c.n + 1;
                c.timer = c.n + 1;
            }
            return;
        }
        return;
    case Phase::Filling: {
        --c.head;
        if (c.k > 0 && c.head >= 1 && c.head <= c.n) {
            const auto layout = fragment_layout(c.n, c.words);
            // The layout of a whole segment is recomputed per write only in
            // this emulation; the cell written is the one under the head.
            pending_writes_.emplace_back(at(c, c.head), (*layout)[c.head - 1]);
        }
        if (--c.timer == 0) {
            start_cycle_left();
        }
        return;
    }
    case Phase::CycleLeft:
        if (!c.crossing) {
            if (--c.timer == 0) {
                if (c.n == 0) {
                    start_cycle_right();
                } else {
                    c.crossing = true;
                    c.timer = c.n;
                }
            }
        } else {
            ++c.head;
            if (--c.timer == 0) {
                start_cycle_right();
            }
        }
        return;
    case Phase::CycleRight:
        if (!c.crossing) {
            if (--c.timer == 0) {
                if (c.n == 0) {
                    start_cycle_left();
                } else {
                    c.crossing = true;
                    c.timer = c.n;
                }
            }
        } else {
            --c.head;
            if (--c.timer == 0) {
                start_cycle_left();
            }
        }
        return;
    case Phase::Forming:
    case Phase::Merged:
        return;
    }
}

std::size_t Construction::flag_compute(const SegmentController& c) {
    const std::size_t n = c.n;
    if (n == 0) {
        return 0;
    }
    const std::size_t S = scratch_width(n);
    // interior offsets are 1..n; mark [lo, hi] clipped to it
    std::size_t count = 0;
    auto mark_range = [&](std::int64_t lo, std::int64_t hi) {
        lo = std::max<std::int64_t>(lo, 1);
        hi = std::min<std::int64_t>(hi, static_cast<std::int64_t>(n));
        for (std::int64_t o = lo; o <= hi; ++o) {
            CellState& cell = cells_[at(c, static_cast<std::size_t>(o))];
            if (!cell.compute) {
                cell.compute = true;
                ++count;
            }
        }
    };
    const auto h = static_cast<std::int64_t>(c.head);
    const auto s = static_cast<std::int64_t>(S);
    switch (c.phase) {
    case Phase::Conscious:
        break;
    case Phase::Computing:
        switch (c.stage) {
        case ComputeStage::Rewind:
            mark_range(h, h);
            break;
        case ComputeStage::Measure: {
            const auto b = static_cast<std::int64_t>(bit_length(c.head));
            mark_range(h - b + 1, h);
            break;
        }
        case ComputeStage::Generate:
            mark_range(static_cast<std::int64_t>(n) - s + 1, static_cast<std::int64_t>(n));
            break;
        }
        break;
    case Phase::Filling:
        mark_range(h, h + s - 1);
        break;
    case Phase::CycleLeft:
        if (c.crossing) {
            mark_range(h - s + 1, h);
        } else {
            mark_range(1, s);
        }
        break;
    case Phase::CycleRight:
        if (c.crossing) {
            mark_range(h, h + s - 1);
        } else {
            mark_range(static_cast<std::int64_t>(n) - s + 1, static_cast<std::int64_t>(n));
        }
        break;
    case Phase::Forming:
    case Phase::Merged:
        break;
    }
    return count;
}

void Construction::commit() {
    for (auto [pos, sym] : pending_writes_) {
        if (cells_[pos].main != kSharp) {
            cells_[pos].main = sym;
        }
    }
    pending_writes_.clear();
    for (CellState& cell : cells_) {
        cell.compute = false;
        cell.probes = 0;
        cell.mark = MergeMark::None;
    }
    auto add_mark = [&](std::size_t pos, MergeMark m) {
        MergeMark& cur = cells_[pos].mark;
        cur = (cur == MergeMark::None || cur == m) ? m : MergeMark::Both;
    };
    for (auto& c : controllers_) {
        if (c.phase == Phase::CycleLeft && !c.crossing) {
            add_mark(c.left, MergeMark::L);
        } else if (c.phase == Phase::CycleRight && !c.crossing) {
            add_mark(c.right, MergeMark::R);
        }
        const std::size_t used = flag_compute(c);
        c.peak_workspace = std::max<std::uint64_t>(c.peak_workspace, used);
        const auto bound = static_cast<std::int64_t>(params_.workspace_constant * log2_or_zero(c.n) + 1);
        worst_slack_ = std::max(worst_slack_, static_cast<std::int64_t>(used) - bound);
    }
    for (const Probe& p : probes_) {
        cells_[p.pos].probes |= p.dir > 0 ? kProbeRight : kProbeLeft;
    }
}

std::vector<SharpEvent> Construction::sharp_events() const {
    std::vector<SharpEvent> out = sharp_events_;
    const std::size_t N = cells_.size();
    for (auto& e : out) {
        std::size_t best = N;
        for (const auto& o : sharp_events_) {
            if (&o == &e || o.position == e.position) {
                continue;
            }
            const std::size_t d = (o.position + N - e.position) % N;
            best = std::min({best, d, N - d});
        }
        e.partner_distance = best;
    }
    return out;
}

std::vector<std::uint64_t> Construction::l_onsets(std::uint64_t controller) const {
    std::vector<std::uint64_t> out;
    for (const auto& e : phase_events_) {
        if (e.controller == controller && e.phase == Phase::CycleLeft) {
            out.push_back(e.time);
        }
    }
    return out;
}

} // namespace mulimit
