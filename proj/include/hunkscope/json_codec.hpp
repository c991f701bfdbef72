// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <hunkscope/classification_store.hpp>
#include <hunkscope/highlighter.hpp>
#include <hunkscope/locator.hpp>

#include <json.hpp>

#include <string>

namespace hunkscope {

void to_json(nlohmann::json& j, const HunkHeader& header);
void to_json(nlohmann::json& j, const HunkLine& line);
void to_json(nlohmann::json& j, const LinePair& pair);
void to_json(nlohmann::json& j, const RegionMatch& match);
void to_json(nlohmann::json& j, const HighlightSpan& span);
void to_json(nlohmann::json& j, const AlignParams& params);

// Text fields may hold arbitrary bytes; invalid UTF-8 is replaced on output.
std::string dump_json(const nlohmann::json& value, int indent = -1);

} // namespace hunkscope
