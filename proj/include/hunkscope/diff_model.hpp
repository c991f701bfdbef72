// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hunkscope {

using LineNumber = std::uint32_t;

struct HunkHeader {
    LineNumber old_start = 0;
    LineNumber old_count = 0;
    LineNumber new_start = 0;
    LineNumber new_count = 0;

    bool operator==(const HunkHeader&) const = default;
};

enum class LineKind { Context, Added, Removed };

const char* line_kind_name(LineKind kind) noexcept;

struct HunkLine {
    LineKind kind = LineKind::Context;
    std::string text;
    std::optional<LineNumber> old_line;
    std::optional<LineNumber> new_line;
    // Verbatim "\ No newline at end of file" marker following this line.
    std::optional<std::string> eof_marker;

    bool operator==(const HunkLine&) const = default;
};

struct Hunk {
    HunkHeader header;
    std::vector<HunkLine> lines;
    std::optional<std::string> section_heading;

    bool operator==(const Hunk&) const = default;
};

struct FilePatch {
    // Git extended headers ("diff --git", "index", mode lines) kept opaque.
    std::vector<std::string> preamble;
    std::string old_path;
    std::string new_path;
    std::vector<Hunk> hunks;

    bool operator==(const FilePatch&) const = default;
};

struct NumberedLine {
    LineNumber line = 0;
    std::string text;

    bool operator==(const NumberedLine&) const = default;
};

// Parses "@@ -a,b +c,d @@ heading". Whitespace after commas and between
// fields is tolerated. Throws DiffError(MalformedHeader).
HunkHeader parse_hunk_header(std::string_view line, std::optional<std::string>* heading = nullptr,
    std::size_t line_number = 1);

std::string format_hunk_header(const HunkHeader& header);

// GNU/git unified diff. Junk before the first "--- "/"+++ " pair is skipped.
std::vector<FilePatch> parse_unified_diff(std::string_view text);

// A sequence of bare hunks with no file headers, as embedded per file in a
// session document.
std::vector<Hunk> parse_hunks(std::string_view text);

std::string serialize(const std::vector<FilePatch>& patches);
std::string serialize(const FilePatch& patch);
std::string serialize(const Hunk& hunk);

std::vector<NumberedLine> pre_image(const Hunk& hunk);
std::vector<NumberedLine> post_image(const Hunk& hunk);

bool is_addition_only(const Hunk& hunk);
bool is_deletion_only(const Hunk& hunk);

// Checks every HunkHeader/HunkLine invariant; throws DiffError on violation.
void validate(const Hunk& hunk);
void validate(const FilePatch& patch);

} // namespace hunkscope
