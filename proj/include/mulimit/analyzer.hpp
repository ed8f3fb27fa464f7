#pragma once

// Density series, segment-class accounting and finite-horizon verdicts.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "mulimit/ca_engine.hpp"
#include "mulimit/cell_state.hpp"
#include "mulimit/rational.hpp"
#include "mulimit/symbolic.hpp"

namespace mulimit {

struct DensitySeries {
    Word word;
    std::map<std::uint64_t, double> samples; // time -> density
    std::size_t trials = 1;
};

/// Window density of every query at times 0, stride, 2*stride, ... <= T.
std::vector<DensitySeries> track(const SpaceTimeRecord& record, std::span<const Word> queries,
                                 std::size_t stride);

/// Mean of per-trial series sampled at the same times.
DensitySeries average(std::span<const DensitySeries> per_trial);

struct SegmentStats {
    std::uint64_t time = 0;
    std::size_t N = 0;
    // bucket (smallest power of two >= n) -> interior cells not flagged compute
    std::map<std::size_t, std::size_t> class_cells;
    std::size_t out_of_segment_cells = 0;
    std::size_t sharp_cells = 0;
    std::size_t compute_cells = 0; // flagged cells inside well-formed segments
    std::size_t sep1_cells = 0;    // informational, counted inside the classes above
    std::size_t sep2_cells = 0;

    double share(std::size_t cells) const { return static_cast<double>(cells) / static_cast<double>(N); }
    double out_of_segment() const { return share(out_of_segment_cells); }
    double sharp_density() const { return share(sharp_cells); }
    double compute_share() const { return share(compute_cells); }
    std::map<std::size_t, double> per_size_class() const;
};

/// Segments are maximal runs between two # (cyclically). A segment is well
/// formed when its interior carries no counter token, no star and no probe;
/// interior cells of other segments, and every cell of a #-free window, count
/// as out of segment.
SegmentStats segment_stats(std::span<const CellState> cells, std::uint64_t time = 0);
/// Main layer only, '#' given by `sharp`.
SegmentStats segment_stats(const CyclicWindow& window, Symbol sharp, std::uint64_t time = 0);

std::size_t size_bucket(std::size_t n);

enum class VerdictClass { Decaying, Persistent, Inconclusive };
const char* verdict_name(VerdictClass c);

inline constexpr double kDecayRatio = 0.2;
inline constexpr double kPersistRatio = 0.5;

struct Verdict {
    Word word;
    VerdictClass cls = VerdictClass::Inconclusive;
    double final_mean = 0;
    double first_mean = 0;
    double peak = 0;
    std::uint64_t transient = 0;
    std::uint64_t horizon = 0;
    std::size_t samples = 0;
    double decay_ratio = kDecayRatio;
    double persist_ratio = kPersistRatio;
    std::string note;
};

/// Over samples with time >= transient: decaying iff final-quarter mean <=
/// decay_ratio * peak and < first-quarter mean; persistent iff final-quarter
/// mean > persist_ratio * peak and > 0; otherwise inconclusive.
Verdict classify(const DensitySeries& series, std::uint64_t transient);

struct TrendSummary {
    double peak = 0;
    double first_mean = 0;
    double final_mean = 0;
    std::size_t samples = 0;
};
/// Same quarter statistics as classify, on a plain time series.
TrendSummary trend(const std::map<std::uint64_t, double>& series, std::uint64_t transient);

/// Mergeable mean/variance (Welford, Chan et al. merge).
class Accumulator {
  public:
    void add(double x);
    void merge(const Accumulator& other);
    std::uint64_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    double variance() const; // sample variance, 0 for n < 2
    double standard_error() const;

  private:
    std::uint64_t n_ = 0;
    double mean_ = 0;
    double m2_ = 0;
};

struct ComparisonReport {
    Word word;
    std::size_t time = 0;
    Rational exact;
    double empirical_mean = 0;
    double standard_error = 0;
    std::size_t trials = 0;
    bool agrees = false; // |mean - exact| <= 3 SE (exact equality when SE = 0)
};

ComparisonReport exact_vs_empirical(const LocalRule& rule, const Word& u, std::size_t n,
                                    std::size_t trials, std::size_t N, std::uint64_t seed = 1);

} // namespace mulimit
