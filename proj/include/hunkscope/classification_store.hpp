// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <hunkscope/diff_model.hpp>

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hunkscope {

// Open-set classification tag. "MO" and "ED" get friendly names; any other
// code is carried through unchanged.
struct Classification {
    std::string code;
    std::string display_name;

    static Classification from_code(std::string code);

    bool operator==(const Classification& other) const { return code == other.code; }
};

inline const Classification missed_opportunity = Classification::from_code("MO");
inline const Classification effort_duplication = Classification::from_code("ED");

struct SessionConfig {
    std::string source_repo;
    std::string target_repo;
    std::chrono::year_month_day divergence_date;
    std::filesystem::path results_path;

    std::string divergence_date_text() const;

    bool operator==(const SessionConfig&) const = default;
};

struct ClassifiedHunk {
    Hunk hunk;
    Classification classification;

    bool operator==(const ClassifiedHunk&) const = default;
};

struct ClassifiedFile {
    std::string path;
    Classification file_classification;
    std::string source_commit;
    std::string target_commit;
    std::string target_path;
    std::vector<ClassifiedHunk> hunks;

    bool operator==(const ClassifiedFile&) const = default;
};

struct ClassifiedPullRequest {
    std::uint64_t number = 0;
    std::string title;
    std::string url;
    std::vector<ClassifiedFile> files;

    bool operator==(const ClassifiedPullRequest&) const = default;
};

struct Session {
    SessionConfig config;
    std::vector<ClassifiedPullRequest> pull_requests;

    const ClassifiedPullRequest* find_pr(std::uint64_t number) const;

    bool operator==(const Session&) const = default;
};

bool is_repo_id(std::string_view text);
bool is_commit_id(std::string_view text);
std::chrono::year_month_day parse_iso_date(std::string_view text);
std::string format_iso_date(std::chrono::year_month_day date);

// `results_path` is either a session document or a directory holding
// session.json.
Session load_session(const std::filesystem::path& results_path);

// Parses an already-read session document; `origin` becomes
// SessionConfig::results_path.
Session parse_session(std::string_view document, const std::filesystem::path& origin = {});

std::vector<ClassifiedPullRequest> filter_by_classification(const std::vector<ClassifiedPullRequest>& prs,
    const Classification& code);

} // namespace hunkscope
