#pragma once

// Layered cell of the construction: main symbol, counter-signal tokens with the
// inner-signal phase counters, merge mark, compute flag and probe bits.

#include <cstdint>

#include "mulimit/symbolic.hpp"

namespace mulimit {

// Reserved main-layer symbols; output glyphs of the family follow from index 5.
inline constexpr Symbol kBlank = 0;
inline constexpr Symbol kSharp = 1;
inline constexpr Symbol kSep1 = 2; // $1, fragment separator
inline constexpr Symbol kSep2 = 3; // $2, copy separator
inline constexpr Symbol kStar = 4;
inline constexpr Symbol kFirstOutput = 5;
inline constexpr const char* kReservedGlyphs = ".#$&*";

namespace tok {
inline constexpr std::uint16_t OuterR = 1u << 0;
inline constexpr std::uint16_t OuterL = 1u << 1;
inline constexpr std::uint16_t InnerR = 1u << 2;
inline constexpr std::uint16_t InnerL = 1u << 3;
inline constexpr std::uint16_t CmpOutL = 1u << 4; // travels left to the inner border
inline constexpr std::uint16_t CmpOutR = 1u << 5;
inline constexpr std::uint16_t CmpBackR = 1u << 6; // bounced, travels right to the anchor
inline constexpr std::uint16_t CmpBackL = 1u << 7;
inline constexpr std::uint16_t AnchorE = 1u << 8; // collision on one cell
inline constexpr std::uint16_t AnchorL = 1u << 9; // collision between this cell and the next
inline constexpr std::uint16_t AnchorR = 1u << 10;
inline constexpr std::uint16_t All = (1u << 11) - 1;
inline constexpr std::uint16_t Anchors = AnchorE | AnchorL | AnchorR;
} // namespace tok

// Both: an L and an R mark sit on the same # in the same step.
enum class MergeMark : std::uint8_t { None = 0, L = 1, R = 2, Both = 3 };

inline constexpr std::uint8_t kProbeRight = 1;
inline constexpr std::uint8_t kProbeLeft = 2;

struct CellState {
    Symbol main = kBlank;
    std::uint16_t tokens = 0;
    std::uint8_t phase_r = 0; // InnerR phase, 0 <= phase < q
    std::uint8_t phase_l = 0;
    MergeMark mark = MergeMark::None;
    bool compute = false;
    std::uint8_t probes = 0;

    bool has(std::uint16_t t) const noexcept { return (tokens & t) != 0; }

    /// main: bits 0-5, tokens 6-16, phase_r 17-18, phase_l 19-20, mark 21-22,
    /// compute 23, probes 24-25.
    std::uint32_t encode() const noexcept {
        return (main & 0x3fu) | (static_cast<std::uint32_t>(tokens & tok::All) << 6) |
               (static_cast<std::uint32_t>(phase_r & 3u) << 17) |
               (static_cast<std::uint32_t>(phase_l & 3u) << 19) |
               (static_cast<std::uint32_t>(mark) << 21) |
               (static_cast<std::uint32_t>(compute) << 23) |
               (static_cast<std::uint32_t>(probes & 3u) << 24);
    }

    static CellState decode(std::uint32_t v) noexcept {
        CellState c;
        c.main = v & 0x3fu;
        c.tokens = static_cast<std::uint16_t>((v >> 6) & tok::All);
        c.phase_r = static_cast<std::uint8_t>((v >> 17) & 3u);
        c.phase_l = static_cast<std::uint8_t>((v >> 19) & 3u);
        c.mark = static_cast<MergeMark>((v >> 21) & 3u);
        c.compute = ((v >> 23) & 1u) != 0;
        c.probes = static_cast<std::uint8_t>((v >> 24) & 3u);
        return c;
    }

    friend bool operator==(const CellState&, const CellState&) = default;
};

} // namespace mulimit
