// SPDX-License-Identifier: Apache-2.0
#include <hunkscope/classification_store.hpp>
#include <hunkscope/error.hpp>

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace hunkscope {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class SchemaReader {
public:
    const json& field(const json& object, const std::string& pointer, const char* name) const
    {
        if (!object.is_object())
            throw SchemaError(pointer, "expected an object");
        auto it = object.find(name);
        if (it == object.end())
            throw SchemaError(pointer + "/" + name, "missing required field");
        return *it;
    }

    std::string string_field(const json& object, const std::string& pointer, const char* name) const
    {
        const auto& value = field(object, pointer, name);
        if (!value.is_string())
            throw SchemaError(pointer + "/" + name, "expected a string");
        return value.get<std::string>();
    }

    const json& array_field(const json& object, const std::string& pointer, const char* name) const
    {
        const auto& value = field(object, pointer, name);
        if (!value.is_array())
            throw SchemaError(pointer + "/" + name, "expected an array");
        return value;
    }
};

std::vector<Hunk> parse_file_diff(const std::string& diff, const std::string& pointer, std::uint64_t pr,
    const std::string& path)
{
    try {
        // Bare hunks start with their header; anything else is a full diff.
        auto first = diff.find_first_not_of("\r\n");
        if (first != std::string::npos && diff.compare(first, 2, "@@") != 0) {
            auto patches = parse_unified_diff(diff);
            if (patches.size() > 1)
                throw SchemaError(pointer, "diff covers " + std::to_string(patches.size()) + " files, expected one");
            if (patches.empty())
                return {};
            return std::move(patches.front().hunks);
        }
        return parse_hunks(diff);
    } catch (const DiffError& e) {
        throw Error(ErrorCode::HunkValidationError,
            pointer + ": PR #" + std::to_string(pr) + " file " + path + ": " + e.what());
    }
}

ClassifiedFile parse_file(const SchemaReader& reader, const json& node, const std::string& pointer, std::uint64_t pr)
{
    ClassifiedFile file;
    file.path = reader.string_field(node, pointer, "path");
    if (file.path.empty())
        throw SchemaError(pointer + "/path", "path is empty");
    file.target_path = file.path;
    if (auto it = node.find("target_path"); it != node.end()) {
        if (!it->is_string() || it->get<std::string>().empty())
            throw SchemaError(pointer + "/target_path", "expected a non-empty string");
        file.target_path = it->get<std::string>();
    }
    auto code = reader.string_field(node, pointer, "file_classification");
    if (code.empty())
        throw SchemaError(pointer + "/file_classification", "classification code is empty");
    file.file_classification = Classification::from_code(code);

    file.source_commit = reader.string_field(node, pointer, "source_commit");
    if (!is_commit_id(file.source_commit))
        throw SchemaError(pointer + "/source_commit", "expected a 7-40 character hex commit id");
    file.target_commit = reader.string_field(node, pointer, "target_commit");
    if (!is_commit_id(file.target_commit))
        throw SchemaError(pointer + "/target_commit", "expected a 7-40 character hex commit id");

    auto diff = reader.string_field(node, pointer, "diff");
    const auto& codes = reader.array_field(node, pointer, "hunk_classifications");
    auto hunks = parse_file_diff(diff, pointer + "/diff", pr, file.path);
    if (codes.size() != hunks.size())
        throw SchemaError(pointer + "/hunk_classifications",
            "has " + std::to_string(codes.size()) + " entries for " + std::to_string(hunks.size()) + " hunks");
    for (std::size_t i = 0; i < hunks.size(); ++i) {
        auto at = pointer + "/hunk_classifications/" + std::to_string(i);
        if (!codes[i].is_string() || codes[i].get<std::string>().empty())
            throw SchemaError(at, "expected a non-empty classification code");
        file.hunks.push_back({ std::move(hunks[i]), Classification::from_code(codes[i].get<std::string>()) });
    }
    return file;
}

} // namespace

Classification Classification::from_code(std::string code)
{
    Classification c;
    if (code == "MO")
        c.display_name = "Missed Opportunity";
    else if (code == "ED")
        c.display_name = "Effort Duplication";
    else
        c.display_name = code;
    c.code = std::move(code);
    return c;
}

std::string SessionConfig::divergence_date_text() const
{
    return format_iso_date(divergence_date);
}

const ClassifiedPullRequest* Session::find_pr(std::uint64_t number) const
{
    for (const auto& pr : pull_requests) {
        if (pr.number == number)
            return &pr;
    }
    return nullptr;
}

bool is_repo_id(std::string_view text)
{
    auto slash = text.find('/');
    if (slash == std::string_view::npos || slash == 0 || slash + 1 == text.size())
        return false;
    if (text.find('/', slash + 1) != std::string_view::npos)
        return false;
    return std::all_of(text.begin(), text.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_'
            || c == '.' || c == '/';
    });
}

bool is_commit_id(std::string_view text)
{
    if (text.size() < 7 || text.size() > 40)
        return false;
    return std::all_of(text.begin(), text.end(),
        [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F'); });
}

std::chrono::year_month_day parse_iso_date(std::string_view text)
{
    auto digits = [&](std::size_t from, std::size_t count) {
        int value = 0;
        for (std::size_t i = from; i < from + count; ++i) {
            if (text[i] < '0' || text[i] > '9')
                throw Error(ErrorCode::InvalidArgument, "not an ISO-8601 date: " + std::string(text));
            value = value * 10 + (text[i] - '0');
        }
        return value;
    };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-')
        throw Error(ErrorCode::InvalidArgument, "not an ISO-8601 date: " + std::string(text));
    std::chrono::year_month_day date { std::chrono::year { digits(0, 4) },
        std::chrono::month { static_cast<unsigned>(digits(5, 2)) },
        std::chrono::day { static_cast<unsigned>(digits(8, 2)) } };
    if (!date.ok())
        throw Error(ErrorCode::InvalidArgument, "not a calendar date: " + std::string(text));
    return date;
}

std::string format_iso_date(std::chrono::year_month_day date)
{
    char buffer[16];
    std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02u", static_cast<int>(date.year()),
        static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buffer;
}

Session parse_session(std::string_view document, const fs::path& origin)
{
    json doc = json::parse(document, nullptr, false);
    if (doc.is_discarded())
        throw SchemaError("", "session document is not valid JSON");
    if (!doc.is_object())
        throw SchemaError("", "expected an object");

    SchemaReader reader;
    Session session;
    session.config.results_path = origin;
    session.config.source_repo = reader.string_field(doc, "", "source_repo");
    if (!is_repo_id(session.config.source_repo))
        throw SchemaError("/source_repo", "expected owner/name");
    session.config.target_repo = reader.string_field(doc, "", "target_repo");
    if (!is_repo_id(session.config.target_repo))
        throw SchemaError("/target_repo", "expected owner/name");
    try {
        session.config.divergence_date = parse_iso_date(reader.string_field(doc, "", "divergence_date"));
    } catch (const SchemaError&) {
        throw;
    } catch (const Error& e) {
        throw SchemaError("/divergence_date", e.what());
    }

    const auto& prs = reader.array_field(doc, "", "pull_requests");
    std::set<std::uint64_t> seen;
    for (std::size_t i = 0; i < prs.size(); ++i) {
        auto pointer = "/pull_requests/" + std::to_string(i);
        const auto& node = prs[i];
        ClassifiedPullRequest pr;
        const auto& number = reader.field(node, pointer, "number");
        if (!number.is_number_integer() || number.get<std::int64_t>() <= 0)
            throw SchemaError(pointer + "/number", "expected a positive integer");
        pr.number = number.get<std::uint64_t>();
        if (!seen.insert(pr.number).second)
            throw SchemaError(pointer + "/number", "duplicate pull request number " + std::to_string(pr.number));
        pr.title = reader.string_field(node, pointer, "title");
        pr.url = reader.string_field(node, pointer, "url");
        const auto& files = reader.array_field(node, pointer, "files");
        if (files.empty())
            throw SchemaError(pointer + "/files", "pull request lists no files");
        for (std::size_t f = 0; f < files.size(); ++f)
            pr.files.push_back(parse_file(reader, files[f], pointer + "/files/" + std::to_string(f), pr.number));
        session.pull_requests.push_back(std::move(pr));
    }
    return session;
}

Session load_session(const fs::path& results_path)
{
    std::error_code ec;
    auto path = results_path;
    if (fs::is_directory(path, ec))
        path /= "session.json";
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot read session document " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad())
        throw Error(ErrorCode::IoError, "error reading " + path.string());
    return parse_session(buffer.str(), results_path);
}

std::vector<ClassifiedPullRequest> filter_by_classification(const std::vector<ClassifiedPullRequest>& prs,
    const Classification& code)
{
    std::vector<ClassifiedPullRequest> out;
    for (const auto& pr : prs) {
        ClassifiedPullRequest kept = pr;
        kept.files.clear();
        for (const auto& file : pr.files) {
            if (file.file_classification == code)
                kept.files.push_back(file);
        }
        if (!kept.files.empty())
            out.push_back(std::move(kept));
    }
    return out;
}

} // namespace hunkscope
