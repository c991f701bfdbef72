// SPDX-License-Identifier: Apache-2.0
#include <hunkscope/error.hpp>
#include <hunkscope/highlighter.hpp>

#include <algorithm>
#include <map>

namespace hunkscope {

namespace {

ColorClass color_for(LineKind kind)
{
    switch (kind) {
    case LineKind::Added:
        return ColorClass::AddedGreen;
    case LineKind::Removed:
        return ColorClass::RemovedRed;
    case LineKind::Context:
        break;
    }
    return ColorClass::ContextBlue;
}

int precedence(ColorClass color)
{
    switch (color) {
    case ColorClass::AnchorGreen:
        return 3;
    case ColorClass::RemovedRed:
    case ColorClass::AddedGreen:
        return 2;
    case ColorClass::ContextBlue:
        break;
    }
    return 1;
}

// Per-line colors (ascending line order) to maximal same-color runs.
std::vector<HighlightSpan> run_length(Pane pane, const std::map<LineNumber, ColorClass>& colors)
{
    std::vector<HighlightSpan> spans;
    for (const auto& [line, color] : colors) {
        if (!spans.empty() && spans.back().color_class == color && spans.back().end_line + 1 == line) {
            spans.back().end_line = line;
            continue;
        }
        spans.push_back({ pane, line, line, color });
    }
    return spans;
}

} // namespace

const char* pane_name(Pane pane) noexcept
{
    return pane == Pane::HunkView ? "HunkView" : "TargetView";
}

const char* color_class_name(ColorClass color) noexcept
{
    switch (color) {
    case ColorClass::ContextBlue:
        return "ContextBlue";
    case ColorClass::AddedGreen:
        return "AddedGreen";
    case ColorClass::RemovedRed:
        return "RemovedRed";
    case ColorClass::AnchorGreen:
        return "AnchorGreen";
    }
    return "ContextBlue";
}

std::vector<HighlightSpan> hunk_spans(const Hunk& hunk)
{
    std::vector<HighlightSpan> spans;
    LineNumber row = 0;
    for (const auto& line : hunk.lines) {
        ++row;
        auto color = color_for(line.kind);
        if (!spans.empty() && spans.back().color_class == color) {
            spans.back().end_line = row;
            continue;
        }
        spans.push_back({ Pane::HunkView, row, row, color });
    }
    return spans;
}

std::vector<HighlightSpan> target_spans(const RegionMatch& match, const Hunk& hunk, TargetSpanOptions options)
{
    if (match.match_kind == MatchKind::NotFound)
        return {};

    std::map<LineNumber, LineKind> source_kinds;
    for (const auto& line : hunk.lines) {
        if (line.old_line)
            source_kinds[*line.old_line] = line.kind;
    }

    std::map<LineNumber, ColorClass> colors;
    for (const auto& pair : match.pairs) {
        auto it = source_kinds.find(pair.source_old_line);
        if (it == source_kinds.end() || it->second != pair.kind_of_source || pair.kind_of_source == LineKind::Added)
            throw Error(ErrorCode::MismatchedInputs,
                "pair for old line " + std::to_string(pair.source_old_line) + " does not belong to hunk "
                    + format_hunk_header(hunk.header));
        if (pair.kind_of_source == LineKind::Context && !options.color_context)
            continue;
        colors[pair.target_line] = color_for(pair.kind_of_source);
    }
    if (match.pairs.size() > source_kinds.size())
        throw Error(ErrorCode::MismatchedInputs, "match pairs more lines than the hunk's pre-image");
    if (match.insertion_anchor)
        colors[*match.insertion_anchor] = ColorClass::AnchorGreen;
    return run_length(Pane::TargetView, colors);
}

std::vector<HighlightSpan> merge_target_spans(std::span<const HighlightSpan> spans)
{
    std::map<LineNumber, ColorClass> colors;
    for (const auto& span : spans) {
        for (LineNumber line = span.start_line; line <= span.end_line; ++line) {
            auto [it, inserted] = colors.emplace(line, span.color_class);
            if (!inserted && precedence(span.color_class) > precedence(it->second))
                it->second = span.color_class;
        }
    }
    return run_length(Pane::TargetView, colors);
}

} // namespace hunkscope
