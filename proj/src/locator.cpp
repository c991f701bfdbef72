// SPDX-License-Identifier: Apache-2.0
#include <hunkscope/error.hpp>
#include <hunkscope/locator.hpp>
#include <hunkscope/snapshot_fetcher.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace hunkscope {

namespace {

constexpr double score_epsilon = 1e-9;

bool is_space(char c)
{
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

bool is_word(char c)
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

// Sorted, de-duplicated token set of one line.
std::vector<std::string_view> token_set(std::string_view text)
{
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (is_space(c)) {
            ++i;
            continue;
        }
        std::size_t start = i;
        if (is_word(c)) {
            while (i < text.size() && is_word(text[i]))
                ++i;
        } else if (static_cast<unsigned char>(c) >= 0xC0) {
            // One UTF-8 sequence is one token.
            ++i;
            while (i < text.size() && (static_cast<unsigned char>(text[i]) & 0xC0) == 0x80)
                ++i;
        } else {
            ++i;
        }
        tokens.push_back(text.substr(start, i - start));
    }
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    return tokens;
}

struct LineFingerprint {
    std::string normalized;
    std::vector<std::string_view> tokens;
};

LineFingerprint fingerprint(std::string_view text)
{
    LineFingerprint fp;
    fp.normalized = normalize_line(text);
    return fp;
}

void attach_tokens(LineFingerprint& fp)
{
    fp.tokens = token_set(fp.normalized);
}

double similarity(const LineFingerprint& a, const LineFingerprint& b)
{
    if (a.normalized == b.normalized)
        return 1.0;
    std::size_t common = 0;
    auto ia = a.tokens.begin();
    auto ib = b.tokens.begin();
    while (ia != a.tokens.end() && ib != b.tokens.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++common;
            ++ia;
            ++ib;
        }
    }
    std::size_t total = a.tokens.size() + b.tokens.size() - common;
    if (total == 0)
        return 1.0;
    double value = static_cast<double>(common) / static_cast<double>(total);
    // Reserve exactly 1.0 for lines whose normalized text is identical.
    if (value >= 1.0)
        value = std::nextafter(1.0, 0.0);
    return value;
}

std::vector<LineFingerprint> fingerprints(std::span<const std::string> lines)
{
    std::vector<LineFingerprint> out;
    out.reserve(lines.size());
    for (const auto& line : lines)
        out.push_back(fingerprint(line));
    // Token views point into `normalized`, so attach after the vector is stable.
    for (auto& fp : out)
        attach_tokens(fp);
    return out;
}

std::vector<double> similarity_matrix(std::span<const std::string> rows, std::span<const std::string> cols)
{
    auto a = fingerprints(rows);
    auto b = fingerprints(cols);
    std::vector<double> sim(rows.size() * cols.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j)
            sim[i * b.size() + j] = similarity(a[i], b[j]);
    }
    return sim;
}

double substitution_score(double sim, const AlignParams& params)
{
    if (sim >= exact_similarity)
        return params.exact_reward;
    if (sim >= params.tau_line)
        return params.fuzzy_reward;
    return params.mismatch_penalty;
}

constexpr std::size_t no_start = std::numeric_limits<std::size_t>::max();

} // namespace

const char* match_kind_name(MatchKind kind) noexcept
{
    switch (kind) {
    case MatchKind::Exact:
        return "Exact";
    case MatchKind::Shifted:
        return "Shifted";
    case MatchKind::Fuzzy:
        return "Fuzzy";
    case MatchKind::NotFound:
        return "NotFound";
    }
    return "NotFound";
}

std::string normalize_line(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space)
            out += ' ';
        pending_space = false;
        out += c;
    }
    return out;
}

double line_similarity(std::string_view a, std::string_view b)
{
    auto fa = fingerprint(a);
    auto fb = fingerprint(b);
    attach_tokens(fa);
    attach_tokens(fb);
    return similarity(fa, fb);
}

// Smith-Waterman over lines with linear gaps. Besides the score table we keep,
// per cell, the smallest target column at which an optimal path ending there
// can start. Every prefix of such a path scores above zero, which is what
// lets the per-cell minimum compose.
std::optional<Alignment> align_scored(std::span<const double> sim, std::size_t rows, std::size_t cols,
    const AlignParams& params, std::span<const std::uint8_t> blocked)
{
    if (rows == 0 || cols == 0)
        return std::nullopt;

    const std::size_t width = cols + 1;
    std::vector<double> score((rows + 1) * width, 0.0);
    std::vector<std::size_t> start((rows + 1) * width, no_start);
    auto at = [width](std::size_t i, std::size_t j) { return i * width + j; };
    auto is_blocked = [&](std::size_t j) { return !blocked.empty() && blocked[j] != 0; };

    double best = 0.0;
    std::size_t best_i = 0;
    std::size_t best_j = 0;
    std::size_t best_start = no_start;

    for (std::size_t i = 1; i <= rows; ++i) {
        for (std::size_t j = 1; j <= cols; ++j) {
            if (is_blocked(j - 1))
                continue;
            double s = substitution_score(sim[(i - 1) * cols + (j - 1)], params);

            double h = 0.0;
            std::size_t st = no_start;
            auto offer = [&](double value, std::size_t from) {
                if (value <= score_epsilon)
                    return;
                if (value > h + score_epsilon) {
                    h = value;
                    st = from;
                } else if (std::abs(value - h) <= score_epsilon) {
                    st = std::min(st, from);
                }
            };

            double diag = score[at(i - 1, j - 1)];
            if (diag > 0.0)
                offer(diag + s, start[at(i - 1, j - 1)]);
            else
                offer(s, j - 1);
            if (double up = score[at(i - 1, j)]; up > 0.0)
                offer(up + params.gap_penalty, start[at(i - 1, j)]);
            if (double left = score[at(i, j - 1)]; left > 0.0)
                offer(left + params.gap_penalty, start[at(i, j - 1)]);

            if (st == no_start)
                continue;
            score[at(i, j)] = h;
            start[at(i, j)] = st;

            bool better = h > best + score_epsilon;
            bool tie = !better && std::abs(h - best) <= score_epsilon
                && (st < best_start || (st == best_start && j < best_j));
            if (better || tie) {
                best = h;
                best_i = i;
                best_j = j;
                best_start = st;
            }
        }
    }

    if (best_start == no_start)
        return std::nullopt;

    Alignment result;
    result.score = best;
    result.target_begin = best_start;
    result.target_end = best_j - 1;

    std::size_t i = best_i;
    std::size_t j = best_j;
    while (i > 0 && j > 0) {
        double h = score[at(i, j)];
        double similarity_here = sim[(i - 1) * cols + (j - 1)];
        double s = substitution_score(similarity_here, params);
        double diag = score[at(i - 1, j - 1)];
        auto reaches = [&](double value) { return std::abs(value - h) <= score_epsilon; };

        if (diag > 0.0 && reaches(diag + s) && start[at(i - 1, j - 1)] == best_start) {
            if (similarity_here >= params.tau_line)
                result.pairs.push_back({ i - 1, j - 1, similarity_here });
            --i;
            --j;
            continue;
        }
        if (diag <= 0.0 && reaches(s) && j - 1 == best_start) {
            result.pairs.push_back({ i - 1, j - 1, similarity_here });
            break;
        }
        double up = score[at(i - 1, j)];
        if (up > 0.0 && reaches(up + params.gap_penalty) && start[at(i - 1, j)] == best_start) {
            --i;
            continue;
        }
        --j;
    }
    std::reverse(result.pairs.begin(), result.pairs.end());
    return result;
}

std::optional<Alignment> align(std::span<const std::string> pre_image_lines, std::span<const std::string> target_lines,
    const AlignParams& params, std::span<const std::uint8_t> blocked)
{
    auto sim = similarity_matrix(pre_image_lines, target_lines);
    return align_scored(sim, pre_image_lines.size(), target_lines.size(), params, blocked);
}

namespace {

struct PreImage {
    std::vector<std::string> texts;
    std::vector<LineNumber> numbers;
    std::vector<LineKind> kinds;
    // Pre-image index before which an addition-only hunk inserts.
    std::optional<std::size_t> insertion_index;
};

PreImage collect_pre_image(const Hunk& hunk)
{
    PreImage pre;
    bool additions_only = is_addition_only(hunk);
    for (const auto& line : hunk.lines) {
        if (line.kind == LineKind::Added) {
            if (additions_only && !pre.insertion_index)
                pre.insertion_index = pre.texts.size();
            continue;
        }
        pre.texts.push_back(line.text);
        pre.numbers.push_back(*line.old_line);
        pre.kinds.push_back(line.kind);
    }
    return pre;
}

RegionMatch to_region(const Alignment& alignment, const PreImage& pre, std::size_t target_size,
    const AlignParams& params)
{
    RegionMatch match;
    if (alignment.pairs.empty())
        return match;

    double fraction = static_cast<double>(alignment.pairs.size()) / static_cast<double>(pre.texts.size());
    if (fraction + 1e-12 < params.tau_region)
        return match;

    double total = 0.0;
    bool all_identical = true;
    bool at_offset = true;
    for (const auto& p : alignment.pairs) {
        LinePair pair;
        pair.source_old_line = pre.numbers[p.source_index];
        pair.target_line = static_cast<LineNumber>(p.target_index + 1);
        pair.similarity = p.similarity;
        pair.kind_of_source = pre.kinds[p.source_index];
        total += p.similarity;
        all_identical &= p.similarity == 1.0;
        at_offset &= pair.target_line == pair.source_old_line;
        match.pairs.push_back(pair);
    }

    match.target_start = static_cast<LineNumber>(alignment.target_begin + 1);
    match.target_end = static_cast<LineNumber>(alignment.target_end + 1);
    match.confidence = fraction * (total / static_cast<double>(alignment.pairs.size()));

    const LineNumber old_start = pre.numbers.front();
    if (match.confidence == 1.0 && match.target_start == old_start && at_offset)
        match.match_kind = MatchKind::Exact;
    else if (all_identical && (match.target_start != old_start || !at_offset))
        match.match_kind = MatchKind::Shifted;
    else
        match.match_kind = MatchKind::Fuzzy;

    if (pre.insertion_index) {
        const auto cut = *pre.insertion_index;
        std::optional<LineNumber> anchor;
        for (const auto& p : alignment.pairs) {
            if (p.source_index < cut)
                anchor = static_cast<LineNumber>(p.target_index + 2);
        }
        if (!anchor) {
            for (const auto& p : alignment.pairs) {
                if (p.source_index >= cut) {
                    anchor = static_cast<LineNumber>(p.target_index + 1);
                    break;
                }
            }
        }
        if (anchor)
            match.insertion_anchor = std::min<LineNumber>(*anchor, static_cast<LineNumber>(target_size));
    }
    return match;
}

} // namespace

std::vector<RegionMatch> locate_all(const Hunk& hunk, std::span<const std::string> target_lines,
    const AlignParams& params)
{
    if (target_lines.empty())
        throw Error(ErrorCode::EmptyTarget, "target snapshot has no lines");

    auto pre = collect_pre_image(hunk);
    if (pre.texts.empty())
        return {};

    const auto rows = pre.texts.size();
    const auto cols = target_lines.size();
    auto sim = similarity_matrix(pre.texts, target_lines);
    std::vector<std::uint8_t> blocked(cols, 0);

    std::vector<RegionMatch> matches;
    while (auto alignment = align_scored(sim, rows, cols, params, blocked)) {
        auto match = to_region(*alignment, pre, cols, params);
        if (match.match_kind != MatchKind::NotFound)
            matches.push_back(std::move(match));
        std::fill(blocked.begin() + static_cast<std::ptrdiff_t>(alignment->target_begin),
            blocked.begin() + static_cast<std::ptrdiff_t>(alignment->target_end + 1), 1);
    }

    const auto old_start = static_cast<long long>(pre.numbers.front());
    std::stable_sort(matches.begin(), matches.end(), [old_start](const RegionMatch& a, const RegionMatch& b) {
        if (a.confidence != b.confidence)
            return a.confidence > b.confidence;
        auto da = std::llabs(static_cast<long long>(a.target_start) - old_start);
        auto db = std::llabs(static_cast<long long>(b.target_start) - old_start);
        if (da != db)
            return da < db;
        return a.target_start < b.target_start;
    });
    return matches;
}

std::vector<RegionMatch> locate_all(const Hunk& hunk, const Snapshot& target, const AlignParams& params)
{
    return locate_all(hunk, target.lines, params);
}

RegionMatch locate(const Hunk& hunk, std::span<const std::string> target_lines, const AlignParams& params)
{
    auto all = locate_all(hunk, target_lines, params);
    if (all.empty())
        return {};
    return std::move(all.front());
}

RegionMatch locate(const Hunk& hunk, const Snapshot& target, const AlignParams& params)
{
    return locate(hunk, target.lines, params);
}

void check_region_invariants(const RegionMatch& match, std::size_t target_line_count, std::size_t pre_image_size)
{
    auto fail = [](const std::string& why) { throw Error(ErrorCode::MismatchedInputs, "region match invariant: " + why); };

    if (!(match.confidence >= 0.0 && match.confidence <= 1.0))
        fail("confidence outside [0, 1]");
    if (match.pairs.size() > pre_image_size)
        fail("more pairs than pre-image lines");
    if (match.match_kind == MatchKind::NotFound) {
        if (!match.pairs.empty() || match.confidence != 0.0)
            fail("NotFound carries pairs or confidence");
        return;
    }
    if (match.target_start < 1 || match.target_start > match.target_end || match.target_end > target_line_count)
        fail("window outside the target");
    LineNumber previous = 0;
    for (const auto& pair : match.pairs) {
        if (pair.target_line <= previous)
            fail("target lines not strictly increasing");
        if (pair.target_line < match.target_start || pair.target_line > match.target_end)
            fail("pair outside the window");
        if (!(pair.similarity >= 0.0 && pair.similarity <= 1.0))
            fail("similarity outside [0, 1]");
        if (pair.kind_of_source == LineKind::Added)
            fail("added line in a pre-image pairing");
        previous = pair.target_line;
    }
    if (match.match_kind == MatchKind::Exact) {
        if (match.confidence != 1.0 || match.pairs.size() != pre_image_size)
            fail("Exact match is not a full identical pairing");
    }
    if (match.insertion_anchor && (*match.insertion_anchor < 1 || *match.insertion_anchor > target_line_count))
        fail("insertion anchor outside the target");
}

} // namespace hunkscope
