// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <hunkscope/diff_model.hpp>
#include <hunkscope/locator.hpp>

#include <span>
#include <vector>

namespace hunkscope {

enum class Pane { HunkView, TargetView };

enum class ColorClass { ContextBlue, AddedGreen, RemovedRed, AnchorGreen };

const char* pane_name(Pane pane) noexcept;
const char* color_class_name(ColorClass color) noexcept;

struct HighlightSpan {
    Pane pane = Pane::HunkView;
    // 1-based, inclusive. HunkView rows count hunk lines in display order;
    // TargetView rows are absolute target line numbers.
    LineNumber start_line = 0;
    LineNumber end_line = 0;
    ColorClass color_class = ColorClass::ContextBlue;

    bool operator==(const HighlightSpan&) const = default;
};

struct TargetSpanOptions {
    // Paint target lines paired with source context lines.
    bool color_context = true;
};

// One maximal span per run of same-kind hunk lines.
std::vector<HighlightSpan> hunk_spans(const Hunk& hunk);

// Throws Error(MismatchedInputs) when `match` could not have come from `hunk`.
std::vector<HighlightSpan> target_spans(const RegionMatch& match, const Hunk& hunk, TargetSpanOptions options = {});

// Run-length merge of per-line colors for several matches sharing one target
// pane. Overlaps resolve AnchorGreen over RemovedRed over ContextBlue.
std::vector<HighlightSpan> merge_target_spans(std::span<const HighlightSpan> spans);

} // namespace hunkscope
