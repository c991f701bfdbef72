// SPDX-License-Identifier: Apache-2.0
#include <hunkscope/json_codec.hpp>

namespace hunkscope {

using nlohmann::json;

void to_json(json& j, const HunkHeader& header)
{
    j = json { { "old_start", header.old_start }, { "old_count", header.old_count }, { "new_start", header.new_start },
        { "new_count", header.new_count } };
}

void to_json(json& j, const HunkLine& line)
{
    j = json { { "kind", line_kind_name(line.kind) }, { "text", line.text } };
    if (line.old_line)
        j["old_line"] = *line.old_line;
    if (line.new_line)
        j["new_line"] = *line.new_line;
    if (line.eof_marker)
        j["no_newline_at_eof"] = true;
}

void to_json(json& j, const LinePair& pair)
{
    j = json { { "source_old_line", pair.source_old_line }, { "target_line", pair.target_line },
        { "similarity", pair.similarity }, { "kind_of_source", line_kind_name(pair.kind_of_source) } };
}

void to_json(json& j, const RegionMatch& match)
{
    bool found = match.match_kind != MatchKind::NotFound;
    j = json { { "target_start", found ? json(match.target_start) : json(nullptr) },
        { "target_end", found ? json(match.target_end) : json(nullptr) }, { "pairs", match.pairs },
        { "confidence", match.confidence }, { "match_kind", match_kind_name(match.match_kind) },
        { "insertion_anchor", match.insertion_anchor ? json(*match.insertion_anchor) : json(nullptr) } };
}

void to_json(json& j, const HighlightSpan& span)
{
    j = json { { "pane", pane_name(span.pane) }, { "start_line", span.start_line }, { "end_line", span.end_line },
        { "color_class", color_class_name(span.color_class) } };
}

void to_json(json& j, const AlignParams& params)
{
    j = json { { "tau_line", params.tau_line }, { "tau_region", params.tau_region },
        { "exact_reward", params.exact_reward }, { "fuzzy_reward", params.fuzzy_reward },
        { "mismatch_penalty", params.mismatch_penalty }, { "gap_penalty", params.gap_penalty } };
}

std::string dump_json(const json& value, int indent)
{
    return value.dump(indent, ' ', false, json::error_handler_t::replace);
}

} // namespace hunkscope
