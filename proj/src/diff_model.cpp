// SPDX-License-Identifier: Apache-2.0
#include <hunkscope/diff_model.hpp>
#include <hunkscope/error.hpp>

#include <array>
#include <limits>

namespace hunkscope {

namespace {

bool starts_with(std::string_view s, std::string_view prefix)
{
    return s.substr(0, prefix.size()) == prefix;
}

std::vector<std::string_view> split_lines(std::string_view text)
{
    std::vector<std::string_view> lines;
    std::size_t begin = 0;
    while (begin < text.size()) {
        auto end = text.find('\n', begin);
        if (end == std::string_view::npos) {
            lines.push_back(text.substr(begin));
            break;
        }
        lines.push_back(text.substr(begin, end - begin));
        begin = end + 1;
    }
    return lines;
}

class HeaderCursor {
public:
    HeaderCursor(std::string_view text, std::size_t line_number)
        : m_text(text)
        , m_line_number(line_number)
    {
    }

    void skip_spaces()
    {
        while (m_pos < m_text.size() && (m_text[m_pos] == ' ' || m_text[m_pos] == '\t'))
            ++m_pos;
    }

    bool consume(std::string_view token)
    {
        if (m_text.substr(m_pos, token.size()) != token)
            return false;
        m_pos += token.size();
        return true;
    }

    void expect(std::string_view token)
    {
        if (!consume(token))
            fail("expected '" + std::string(token) + "'");
    }

    LineNumber number()
    {
        std::uint64_t value = 0;
        auto start = m_pos;
        while (m_pos < m_text.size() && m_text[m_pos] >= '0' && m_text[m_pos] <= '9') {
            value = value * 10 + static_cast<std::uint64_t>(m_text[m_pos] - '0');
            if (value > std::numeric_limits<LineNumber>::max())
                fail("line number out of range");
            ++m_pos;
        }
        if (m_pos == start)
            fail("expected a line number");
        return static_cast<LineNumber>(value);
    }

    // "start[,count]" with optional whitespace around the comma.
    std::pair<LineNumber, LineNumber> range()
    {
        auto start = number();
        auto save = m_pos;
        skip_spaces();
        if (consume(",")) {
            skip_spaces();
            return { start, number() };
        }
        m_pos = save;
        return { start, 1 };
    }

    std::string_view rest() const { return m_text.substr(m_pos); }

    [[noreturn]] void fail(const std::string& why) const
    {
        throw DiffError(ErrorCode::MalformedHeader, m_line_number,
            "malformed hunk header '" + std::string(m_text) + "': " + why);
    }

private:
    std::string_view m_text;
    std::size_t m_pos = 0;
    std::size_t m_line_number;
};

void check_header_invariants(const HunkHeader& header, std::size_t line_number)
{
    if (header.old_start == 0 && header.old_count != 0)
        throw DiffError(ErrorCode::MalformedHeader, line_number, "old_start 0 requires old_count 0");
    if (header.new_start == 0 && header.new_count != 0)
        throw DiffError(ErrorCode::MalformedHeader, line_number, "new_start 0 requires new_count 0");
}

class Parser {
public:
    explicit Parser(std::string_view text)
        : m_lines(split_lines(text))
    {
    }

    std::vector<FilePatch> parse_files()
    {
        std::vector<FilePatch> patches;
        std::vector<std::string_view> pending;
        bool after_hunk = false;

        while (m_pos < m_lines.size()) {
            auto line = m_lines[m_pos];
            if (is_file_header(m_pos)) {
                FilePatch patch;
                patch.preamble.assign(pending.begin(), pending.end());
                pending.clear();
                patch.old_path = parse_path(line.substr(4), "a/");
                patch.new_path = parse_path(m_lines[m_pos + 1].substr(4), "b/");
                m_pos += 2;
                patch.hunks = parse_hunk_run();
                check_order(patch.hunks);
                patches.push_back(std::move(patch));
                after_hunk = !patches.back().hunks.empty();
                continue;
            }
            if (after_hunk)
                check_no_overflow(line);
            after_hunk = false;

            if (starts_with(line, "diff "))
                pending.assign(1, line);
            else if (!pending.empty())
                pending.push_back(line);
            ++m_pos;
        }
        return patches;
    }

    std::vector<Hunk> parse_bare_hunks()
    {
        std::vector<Hunk> hunks;
        while (m_pos < m_lines.size()) {
            if (!starts_with(m_lines[m_pos], "@@")) {
                ++m_pos;
                continue;
            }
            auto run = parse_hunk_run();
            if (m_pos < m_lines.size())
                check_no_overflow(m_lines[m_pos]);
            for (auto& h : run)
                hunks.push_back(std::move(h));
        }
        check_order(hunks);
        return hunks;
    }

private:
    bool is_file_header(std::size_t i) const
    {
        return starts_with(m_lines[i], "--- ") && i + 1 < m_lines.size() && starts_with(m_lines[i + 1], "+++ ");
    }

    static std::string parse_path(std::string_view raw, std::string_view prefix)
    {
        auto tab = raw.find('\t');
        if (tab != std::string_view::npos)
            raw = raw.substr(0, tab);
        while (!raw.empty() && (raw.back() == '\r' || raw.back() == ' '))
            raw.remove_suffix(1);
        if (raw != "/dev/null" && starts_with(raw, prefix))
            raw.remove_prefix(prefix.size());
        return std::string(raw);
    }

    // A line that looks like hunk body right after a hunk means the body was
    // longer than its header said.
    void check_no_overflow(std::string_view line) const
    {
        if (line == "-- ")
            return;
        if (starts_with(line, "--- ") && is_file_header(m_pos))
            return;
        if (!line.empty() && (line[0] == '+' || line[0] == '-' || line[0] == ' '))
            throw DiffError(ErrorCode::CountMismatch, m_pos + 1, "hunk body has more lines than its header declares");
    }

    std::vector<Hunk> parse_hunk_run()
    {
        std::vector<Hunk> hunks;
        while (m_pos < m_lines.size() && starts_with(m_lines[m_pos], "@@"))
            hunks.push_back(parse_hunk());
        return hunks;
    }

    Hunk parse_hunk()
    {
        auto header_line = m_pos + 1;
        Hunk hunk;
        hunk.header = parse_hunk_header(m_lines[m_pos], &hunk.section_heading, header_line);
        ++m_pos;

        auto old_left = hunk.header.old_count;
        auto new_left = hunk.header.new_count;
        auto old_no = hunk.header.old_start;
        auto new_no = hunk.header.new_start;

        auto mismatch = [&](const std::string& why) {
            throw DiffError(ErrorCode::CountMismatch, m_pos + 1,
                "hunk at line " + std::to_string(header_line) + ": " + why);
        };

        while (old_left > 0 || new_left > 0) {
            if (m_pos >= m_lines.size())
                throw DiffError(ErrorCode::TruncatedHunk, m_pos,
                    "hunk at line " + std::to_string(header_line) + " ends before its declared " + std::to_string(old_left)
                        + " old / " + std::to_string(new_left) + " new lines");
            auto line = m_lines[m_pos];
            if (!line.empty() && line[0] == '\\') {
                if (hunk.lines.empty())
                    mismatch("end-of-file marker before any hunk line");
                hunk.lines.back().eof_marker = std::string(line);
                ++m_pos;
                continue;
            }
            char marker = line.empty() ? ' ' : line[0];
            std::string text(line.empty() ? std::string_view {} : line.substr(1));
            HunkLine hl;
            switch (marker) {
            case ' ':
                if (old_left == 0 || new_left == 0)
                    mismatch("context line exceeds header counts");
                hl = { LineKind::Context, std::move(text), old_no++, new_no++, std::nullopt };
                --old_left;
                --new_left;
                break;
            case '-':
                if (old_left == 0)
                    mismatch("removed line exceeds old count");
                hl = { LineKind::Removed, std::move(text), old_no++, std::nullopt, std::nullopt };
                --old_left;
                break;
            case '+':
                if (new_left == 0)
                    mismatch("added line exceeds new count");
                hl = { LineKind::Added, std::move(text), std::nullopt, new_no++, std::nullopt };
                --new_left;
                break;
            default:
                mismatch("body ended with " + std::to_string(old_left) + " old / " + std::to_string(new_left)
                    + " new lines outstanding");
            }
            hunk.lines.push_back(std::move(hl));
            ++m_pos;
        }
        if (m_pos < m_lines.size() && !m_lines[m_pos].empty() && m_lines[m_pos][0] == '\\' && !hunk.lines.empty()) {
            hunk.lines.back().eof_marker = std::string(m_lines[m_pos]);
            ++m_pos;
        }
        return hunk;
    }

    void check_order(const std::vector<Hunk>& hunks) const
    {
        std::uint64_t previous_end = 0;
        for (const auto& h : hunks) {
            std::uint64_t begin = h.header.old_count == 0 ? std::uint64_t(h.header.old_start) + 1 : h.header.old_start;
            if (begin < previous_end)
                throw DiffError(ErrorCode::MalformedHeader, m_pos,
                    "hunk " + format_hunk_header(h.header) + " overlaps or precedes the previous hunk");
            previous_end = begin + h.header.old_count;
        }
    }

    std::vector<std::string_view> m_lines;
    std::size_t m_pos = 0;
};

char marker_for(LineKind kind)
{
    switch (kind) {
    case LineKind::Added:
        return '+';
    case LineKind::Removed:
        return '-';
    case LineKind::Context:
        break;
    }
    return ' ';
}

void append_hunk(std::string& out, const Hunk& hunk)
{
    out += format_hunk_header(hunk.header);
    if (hunk.section_heading) {
        out += ' ';
        out += *hunk.section_heading;
    }
    out += '\n';
    for (const auto& line : hunk.lines) {
        out += marker_for(line.kind);
        out += line.text;
        out += '\n';
        if (line.eof_marker) {
            out += *line.eof_marker;
            out += '\n';
        }
    }
}

std::string labelled(const std::string& path, const char* prefix)
{
    if (path == "/dev/null")
        return path;
    return prefix + path;
}

} // namespace

const char* line_kind_name(LineKind kind) noexcept
{
    switch (kind) {
    case LineKind::Context:
        return "Context";
    case LineKind::Added:
        return "Added";
    case LineKind::Removed:
        return "Removed";
    }
    return "Context";
}

HunkHeader parse_hunk_header(std::string_view line, std::optional<std::string>* heading, std::size_t line_number)
{
    HeaderCursor cursor(line, line_number);
    cursor.expect("@@");
    cursor.skip_spaces();
    cursor.expect("-");
    cursor.skip_spaces();
    auto [old_start, old_count] = cursor.range();
    cursor.skip_spaces();
    cursor.expect("+");
    cursor.skip_spaces();
    auto [new_start, new_count] = cursor.range();
    cursor.skip_spaces();
    cursor.expect("@@");

    HunkHeader header { old_start, old_count, new_start, new_count };
    check_header_invariants(header, line_number);

    if (heading) {
        auto rest = cursor.rest();
        if (!rest.empty() && rest[0] == ' ')
            rest.remove_prefix(1);
        if (rest.empty())
            heading->reset();
        else
            *heading = std::string(rest);
    }
    return header;
}

std::string format_hunk_header(const HunkHeader& header)
{
    auto range = [](LineNumber start, LineNumber count) {
        auto s = std::to_string(start);
        if (count != 1)
            s += "," + std::to_string(count);
        return s;
    };
    return "@@ -" + range(header.old_start, header.old_count) + " +" + range(header.new_start, header.new_count) + " @@";
}

std::vector<FilePatch> parse_unified_diff(std::string_view text)
{
    return Parser(text).parse_files();
}

std::vector<Hunk> parse_hunks(std::string_view text)
{
    return Parser(text).parse_bare_hunks();
}

std::string serialize(const Hunk& hunk)
{
    std::string out;
    append_hunk(out, hunk);
    return out;
}

std::string serialize(const FilePatch& patch)
{
    std::string out;
    for (const auto& line : patch.preamble) {
        out += line;
        out += '\n';
    }
    out += "--- " + labelled(patch.old_path, "a/") + "\n";
    out += "+++ " + labelled(patch.new_path, "b/") + "\n";
    for (const auto& hunk : patch.hunks)
        append_hunk(out, hunk);
    return out;
}

std::string serialize(const std::vector<FilePatch>& patches)
{
    std::string out;
    for (const auto& patch : patches)
        out += serialize(patch);
    return out;
}

std::vector<NumberedLine> pre_image(const Hunk& hunk)
{
    std::vector<NumberedLine> out;
    out.reserve(hunk.header.old_count);
    for (const auto& line : hunk.lines) {
        if (line.kind != LineKind::Added)
            out.push_back({ *line.old_line, line.text });
    }
    return out;
}

std::vector<NumberedLine> post_image(const Hunk& hunk)
{
    std::vector<NumberedLine> out;
    out.reserve(hunk.header.new_count);
    for (const auto& line : hunk.lines) {
        if (line.kind != LineKind::Removed)
            out.push_back({ *line.new_line, line.text });
    }
    return out;
}

bool is_addition_only(const Hunk& hunk)
{
    bool added = false;
    for (const auto& line : hunk.lines) {
        if (line.kind == LineKind::Removed)
            return false;
        added |= line.kind == LineKind::Added;
    }
    return added;
}

bool is_deletion_only(const Hunk& hunk)
{
    bool removed = false;
    for (const auto& line : hunk.lines) {
        if (line.kind == LineKind::Added)
            return false;
        removed |= line.kind == LineKind::Removed;
    }
    return removed;
}

void validate(const Hunk& hunk)
{
    check_header_invariants(hunk.header, 0);
    LineNumber old_no = hunk.header.old_start;
    LineNumber new_no = hunk.header.new_start;
    LineNumber old_seen = 0;
    LineNumber new_seen = 0;
    for (const auto& line : hunk.lines) {
        bool wants_old = line.kind != LineKind::Added;
        bool wants_new = line.kind != LineKind::Removed;
        if (line.old_line.has_value() != wants_old || line.new_line.has_value() != wants_new)
            throw DiffError(ErrorCode::CountMismatch, 0, std::string(line_kind_name(line.kind)) + " line has wrong line numbers");
        if (wants_old) {
            if (*line.old_line != old_no)
                throw DiffError(ErrorCode::CountMismatch, 0, "old line numbers are not consecutive");
            ++old_no;
            ++old_seen;
        }
        if (wants_new) {
            if (*line.new_line != new_no)
                throw DiffError(ErrorCode::CountMismatch, 0, "new line numbers are not consecutive");
            ++new_no;
            ++new_seen;
        }
    }
    if (old_seen != hunk.header.old_count || new_seen != hunk.header.new_count)
        throw DiffError(ErrorCode::CountMismatch, 0, "hunk body disagrees with " + format_hunk_header(hunk.header));
}

void validate(const FilePatch& patch)
{
    std::uint64_t previous_end = 0;
    for (const auto& hunk : patch.hunks) {
        validate(hunk);
        std::uint64_t begin = hunk.header.old_count == 0 ? std::uint64_t(hunk.header.old_start) + 1 : hunk.header.old_start;
        if (begin < previous_end)
            throw DiffError(ErrorCode::MalformedHeader, 0, "hunks overlap or are out of order");
        previous_end = begin + hunk.header.old_count;
    }
}

} // namespace hunkscope
