// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <hunkscope/diff_model.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hunkscope {

struct Snapshot;

// Scoring and acceptance knobs for hunk localization. Field names are shared
// with the CLI flags and the service/config JSON.
struct AlignParams {
    double tau_line = 0.5;
    double tau_region = 0.6;
    double exact_reward = 2.0;
    double fuzzy_reward = 1.0;
    double mismatch_penalty = -1.0;
    double gap_penalty = -1.0;

    bool operator==(const AlignParams&) const = default;
};

// Similarity at or above this counts as an exact line match for scoring.
inline constexpr double exact_similarity = 0.999;

enum class MatchKind { Exact, Shifted, Fuzzy, NotFound };

const char* match_kind_name(MatchKind kind) noexcept;

struct LinePair {
    LineNumber source_old_line = 0;
    LineNumber target_line = 0;
    double similarity = 0.0;
    LineKind kind_of_source = LineKind::Context;

    bool operator==(const LinePair&) const = default;
};

struct RegionMatch {
    // 0 when match_kind is NotFound.
    LineNumber target_start = 0;
    LineNumber target_end = 0;
    std::vector<LinePair> pairs;
    double confidence = 0.0;
    MatchKind match_kind = MatchKind::NotFound;
    std::optional<LineNumber> insertion_anchor;

    bool operator==(const RegionMatch&) const = default;
};

// One aligned step of the winning local alignment; both indices are 0-based.
struct AlignedLine {
    std::size_t source_index = 0;
    std::size_t target_index = 0;
    double similarity = 0.0;

    bool operator==(const AlignedLine&) const = default;
};

struct Alignment {
    // 0-based, inclusive.
    std::size_t target_begin = 0;
    std::size_t target_end = 0;
    // Diagonal steps whose similarity reached tau_line.
    std::vector<AlignedLine> pairs;
    double score = 0.0;

    bool operator==(const Alignment&) const = default;
};

std::string normalize_line(std::string_view text);

// Token-set Jaccard index over normalized lines. Tokens are maximal
// [A-Za-z0-9_] runs, plus every other non-space character on its own.
double line_similarity(std::string_view a, std::string_view b);

// Line-granular Smith-Waterman. Returns nullopt when no alignment scores
// above zero. `blocked` (optional, one flag per target line) marks lines no
// alignment may touch or cross.
std::optional<Alignment> align(std::span<const std::string> pre_image_lines, std::span<const std::string> target_lines,
    const AlignParams& params, std::span<const std::uint8_t> blocked = {});

// Same as above with a precomputed similarity matrix (row-major,
// pre_image x target).
std::optional<Alignment> align_scored(std::span<const double> similarity, std::size_t rows, std::size_t cols,
    const AlignParams& params, std::span<const std::uint8_t> blocked = {});

// Best accepted region for the hunk's pre-image, or a NotFound match.
RegionMatch locate(const Hunk& hunk, const Snapshot& target, const AlignParams& params);
RegionMatch locate(const Hunk& hunk, std::span<const std::string> target_lines, const AlignParams& params);

// Every non-overlapping accepted region, ranked by confidence, then distance
// from the hunk's old_start, then target_start.
std::vector<RegionMatch> locate_all(const Hunk& hunk, const Snapshot& target, const AlignParams& params);
std::vector<RegionMatch> locate_all(const Hunk& hunk, std::span<const std::string> target_lines, const AlignParams& params);

// Throws Error(MismatchedInputs) if `match` breaks a RegionMatch invariant
// for a target of `target_line_count` lines.
void check_region_invariants(const RegionMatch& match, std::size_t target_line_count, std::size_t pre_image_size);

} // namespace hunkscope
