// SPDX-License-Identifier: Apache-2.0
#include <hunkscope/api_service.hpp>
#include <hunkscope/error.hpp>
#include <hunkscope/highlighter.hpp>
#include <hunkscope/json_codec.hpp>

#include <charconv>
#include <cstdlib>
#include <iostream>
#include <set>
#include <tuple>

namespace hunkscope {

using nlohmann::json;

namespace {

ApiResponse problem(int status, const std::string& code, const std::string& message, json detail = nullptr)
{
    json body = { { "code", code }, { "message", message } };
    if (!detail.is_null())
        body["detail"] = std::move(detail);
    return { status, dump_json(body) };
}

ApiResponse ok(const json& body)
{
    return { 200, dump_json(body) };
}

std::vector<std::string> split_path(const std::string& path)
{
    std::vector<std::string> parts;
    std::size_t i = 0;
    while (i < path.size()) {
        while (i < path.size() && path[i] == '/')
            ++i;
        auto end = path.find('/', i);
        if (end == std::string::npos)
            end = path.size();
        if (end > i)
            parts.push_back(path.substr(i, end - i));
        i = end;
    }
    return parts;
}

template <typename T>
std::optional<T> parse_number(const std::string& text)
{
    T value {};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc {} || ptr != text.data() + text.size())
        return std::nullopt;
    return value;
}

std::optional<double> parse_double(const std::string& text)
{
    if (text.empty())
        return std::nullopt;
    char* end = nullptr;
    double value = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size())
        return std::nullopt;
    return value;
}

json classification_json(const Classification& c)
{
    return { { "code", c.code }, { "display_name", c.display_name } };
}

json numbered_lines(const std::vector<NumberedLine>& lines)
{
    json out = json::array();
    for (const auto& l : lines)
        out.push_back({ { "line", l.line }, { "text", l.text } });
    return out;
}

// Query keys each route accepts.
ApiResponse check_query(const ApiRequest& request, std::initializer_list<const char*> allowed)
{
    for (const auto& [key, value] : request.query) {
        bool known = false;
        for (const char* a : allowed)
            known |= key == a;
        if (!known)
            return problem(400, "UnknownQueryParam", "unknown query parameter '" + key + "'");
    }
    return { 0, {} };
}

std::optional<std::string> query_value(const ApiRequest& request, const std::string& key)
{
    auto it = request.query.find(key);
    if (it == request.query.end())
        return std::nullopt;
    return it->second;
}

ApiResponse error_response(const Error& e)
{
    switch (e.code()) {
    case ErrorCode::RateLimited: {
        json detail = nullptr;
        if (const auto* fetch = dynamic_cast<const FetchError*>(&e); fetch && fetch->reset_at())
            detail = { { "reset_at", *fetch->reset_at() } };
        return problem(429, "RateLimited", e.what(), detail);
    }
    case ErrorCode::NotFound:
    case ErrorCode::AuthRequired:
    case ErrorCode::OfflineMiss:
    case ErrorCode::NetworkError:
        return problem(502, "FetchFailed", e.what(), { { "cause", error_code_name(e.code()) } });
    default:
        return problem(500, "InternalError", e.what(), { { "cause", error_code_name(e.code()) } });
    }
}

void scrub(std::string& text, const std::string& secret)
{
    if (secret.empty())
        return;
    std::size_t pos = 0;
    while ((pos = text.find(secret, pos)) != std::string::npos) {
        text.replace(pos, secret.size(), "***");
        pos += 3;
    }
}

std::string token_value(const std::string& env)
{
    if (env.empty())
        return {};
    const char* value = std::getenv(env.c_str());
    return value ? std::string(value) : std::string();
}

struct MemoKey {
    std::uint64_t generation;
    std::uint64_t pr;
    std::size_t file;
    double tau_line;
    double tau_region;

    auto operator<=>(const MemoKey&) const = default;
};

struct TargetMapping {
    json matches;
    json spans;
};

} // namespace

struct ApiService::Memo {
    std::mutex mutex;
    std::map<MemoKey, std::shared_ptr<const TargetMapping>> entries;
};

ApiService::ApiService(ServiceConfig config, std::shared_ptr<SnapshotFetcher> fetcher,
    std::shared_ptr<Orchestrator> orchestrator)
    : m_config(std::move(config))
    , m_fetcher(std::move(fetcher))
    , m_orchestrator(std::move(orchestrator))
    , m_memo(std::make_unique<Memo>())
{
}

ApiService::~ApiService() = default;

ApiResponse ApiService::handle(const ApiRequest& request)
{
    auto response = route(request);
    scrub(response.body, token_value(m_config.fetcher.token_env));
    return response;
}

ApiResponse ApiService::route(const ApiRequest& request)
{
    ApiResponse response;
    try {
        auto parts = split_path(request.path);
        auto method_not_allowed = [&] { return problem(405, "MethodNotAllowed", request.method + " " + request.path); };

        if (parts.size() == 1 && parts[0] == "orchestrate") {
            response = request.method == "POST" ? post_orchestrate(request) : method_not_allowed();
        } else if (parts.size() == 1 && parts[0] == "session") {
            response = request.method == "GET" ? get_session() : method_not_allowed();
            if (request.method == "GET" && !request.query.empty())
                response = check_query(request, {});
        } else if (!parts.empty() && parts[0] == "prs") {
            if (request.method != "GET")
                return method_not_allowed();
            if (parts.size() == 1) {
                response = get_prs(request);
            } else {
                auto pr = parse_number<std::uint64_t>(parts[1]);
                if (!pr)
                    return problem(404, "UnknownPr", "no pull request '" + parts[1] + "'");
                if (parts.size() == 3 && parts[2] == "files") {
                    response = check_query(request, {});
                    if (response.status == 0)
                        response = get_files(*pr);
                } else if (parts.size() == 5 && parts[2] == "files") {
                    auto file = parse_number<std::size_t>(parts[3]);
                    if (!file)
                        return problem(404, "UnknownFile", "no file index '" + parts[3] + "'");
                    if (parts[4] == "hunks") {
                        response = check_query(request, {});
                        if (response.status == 0)
                            response = get_hunks(*pr, *file);
                    } else if (parts[4] == "target") {
                        response = check_query(request, { "policy", "tau_line", "tau_region" });
                        if (response.status == 0)
                            response = get_target(*pr, *file, request);
                    } else {
                        response = problem(404, "NoRoute", "no route " + request.path);
                    }
                } else {
                    response = problem(404, "NoRoute", "no route " + request.path);
                }
            }
        } else {
            response = problem(404, "NoRoute", "no route " + request.path);
        }
    } catch (const Error& e) {
        response = error_response(e);
    } catch (const std::exception& e) {
        response = problem(500, "InternalError", e.what());
    }
    return response;
}

ApiResponse ApiService::get_session()
{
    auto active = m_orchestrator->registry().active();
    if (!active)
        return problem(409, "NoSession", "no session is loaded");
    const auto& cfg = active->session.config;
    return ok({ { "source_repo", cfg.source_repo }, { "target_repo", cfg.target_repo },
        { "divergence_date", cfg.divergence_date_text() } });
}

ApiResponse ApiService::get_prs(const ApiRequest& request)
{
    if (auto bad = check_query(request, { "classification" }); bad.status != 0)
        return bad;
    auto active = m_orchestrator->registry().active();
    if (!active)
        return problem(409, "NoSession", "no session is loaded");

    std::vector<ClassifiedPullRequest> prs;
    if (auto code = query_value(request, "classification")) {
        if (code->empty())
            return problem(400, "BadRequest", "classification must not be empty");
        prs = filter_by_classification(active->session.pull_requests, Classification::from_code(*code));
    } else {
        prs = active->session.pull_requests;
    }
    json out = json::array();
    for (const auto& pr : prs)
        out.push_back({ { "number", pr.number }, { "title", pr.title }, { "url", pr.url }, { "file_count", pr.files.size() } });
    return ok(out);
}

ApiResponse ApiService::get_files(std::uint64_t number)
{
    auto active = m_orchestrator->registry().active();
    if (!active)
        return problem(409, "NoSession", "no session is loaded");
    const auto* pr = active->session.find_pr(number);
    if (!pr)
        return problem(404, "UnknownPr", "no pull request #" + std::to_string(number));
    json out = json::array();
    for (std::size_t i = 0; i < pr->files.size(); ++i) {
        const auto& f = pr->files[i];
        out.push_back({ { "index", i }, { "path", f.path }, { "target_path", f.target_path },
            { "file_classification", classification_json(f.file_classification) },
            { "source_commit", f.source_commit }, { "target_commit", f.target_commit },
            { "hunk_count", f.hunks.size() } });
    }
    return ok(out);
}

ApiResponse ApiService::get_hunks(std::uint64_t number, std::size_t index)
{
    auto active = m_orchestrator->registry().active();
    if (!active)
        return problem(409, "NoSession", "no session is loaded");
    const auto* pr = active->session.find_pr(number);
    if (!pr)
        return problem(404, "UnknownPr", "no pull request #" + std::to_string(number));
    if (index >= pr->files.size())
        return problem(404, "UnknownFile", "pull request #" + std::to_string(number) + " has no file " + std::to_string(index));

    json out = json::array();
    const auto& file = pr->files[index];
    for (std::size_t h = 0; h < file.hunks.size(); ++h) {
        const auto& hunk = file.hunks[h].hunk;
        out.push_back({ { "hunk_index", h }, { "header", hunk.header },
            { "section_heading", hunk.section_heading ? json(*hunk.section_heading) : json(nullptr) },
            { "lines", hunk.lines }, { "classification", classification_json(file.hunks[h].classification) },
            { "spans", hunk_spans(hunk) }, { "pre_image", numbered_lines(pre_image(hunk)) },
            { "post_image", numbered_lines(post_image(hunk)) } });
    }
    return ok(out);
}

ApiResponse ApiService::get_target(std::uint64_t number, std::size_t index, const ApiRequest& request)
{
    auto active = m_orchestrator->registry().active();
    if (!active)
        return problem(409, "NoSession", "no session is loaded");
    const auto* pr = active->session.find_pr(number);
    if (!pr)
        return problem(404, "UnknownPr", "no pull request #" + std::to_string(number));
    if (index >= pr->files.size())
        return problem(404, "UnknownFile", "pull request #" + std::to_string(number) + " has no file " + std::to_string(index));

    auto policy = m_config.default_policy;
    if (auto text = query_value(request, "policy")) {
        auto parsed = parse_policy(*text);
        if (!parsed)
            return problem(400, "BadRequest", "unknown policy '" + *text + "'");
        policy = *parsed;
    }
    AlignParams params = m_config.align;
    for (auto [name, field] : { std::pair { "tau_line", &params.tau_line }, std::pair { "tau_region", &params.tau_region } }) {
        if (auto text = query_value(request, name)) {
            auto value = parse_double(*text);
            if (!value || *value < 0.0 || *value > 1.0)
                return problem(400, "BadRequest", std::string(name) + " must be a number in [0, 1]");
            *field = *value;
        }
    }

    const auto& file = pr->files[index];
    auto snapshot = m_fetcher->fetch({ active->session.config.target_repo, file.target_commit, file.target_path }, policy);

    MemoKey key { active->generation, number, index, params.tau_line, params.tau_region };
    std::shared_ptr<const TargetMapping> mapping;
    {
        std::lock_guard lock(m_memo->mutex);
        // Entries of replaced sessions are dropped lazily.
        for (auto it = m_memo->entries.begin(); it != m_memo->entries.end();) {
            if (it->first.generation != active->generation)
                it = m_memo->entries.erase(it);
            else
                ++it;
        }
        if (auto it = m_memo->entries.find(key); it != m_memo->entries.end())
            mapping = it->second;
    }
    if (!mapping) {
        auto computed = std::make_shared<TargetMapping>();
        computed->matches = json::array();
        std::vector<HighlightSpan> spans;
        for (std::size_t h = 0; h < file.hunks.size() && !snapshot.lines.empty(); ++h) {
            const auto& hunk = file.hunks[h].hunk;
            auto pre_size = pre_image(hunk).size();
            auto matches = locate_all(hunk, snapshot, params);
            for (std::size_t rank = 0; rank < matches.size(); ++rank) {
                check_region_invariants(matches[rank], snapshot.lines.size(), pre_size);
                json entry = matches[rank];
                entry["hunk_index"] = h;
                entry["rank"] = rank;
                computed->matches.push_back(std::move(entry));
                auto hs = target_spans(matches[rank], hunk);
                spans.insert(spans.end(), hs.begin(), hs.end());
            }
        }
        computed->spans = merge_target_spans(spans);
        std::lock_guard lock(m_memo->mutex);
        mapping = m_memo->entries.try_emplace(key, std::move(computed)).first->second;
    }

    return ok({ { "lines", snapshot.lines }, { "matches", mapping->matches }, { "spans", mapping->spans },
        { "origin", origin_name(snapshot.origin) } });
}

ApiResponse ApiService::post_orchestrate(const ApiRequest& request)
{
    json body = json::parse(request.body, nullptr, false);
    if (body.is_discarded() || !body.is_object())
        return problem(400, "BadRequest", "request body must be a JSON object");
    auto action = body.value("action", std::string());

    try {
        std::shared_ptr<const LoadedSession> loaded;
        std::filesystem::path results;
        if (action == "load") {
            auto path = body.value("results_path", std::string());
            if (path.empty())
                return problem(400, "BadRequest", "load requires results_path");
            results = path;
            loaded = m_orchestrator->load_previous(results);
        } else if (action == "run") {
            auto inv = m_config.analyzer;
            inv.command_template = body.value("command", inv.command_template);
            inv.executable = body.value("executable", inv.executable);
            inv.source_repo = body.value("source_repo", inv.source_repo);
            inv.target_repo = body.value("target_repo", inv.target_repo);
            inv.divergence_date = body.value("divergence_date", inv.divergence_date);
            if (body.contains("output_dir"))
                inv.output_dir = body.value("output_dir", std::string());
            if (body.contains("timeout_seconds"))
                inv.timeout = std::chrono::milliseconds(static_cast<long long>(body.value("timeout_seconds", 0.0) * 1000));
            auto secret = token_value(inv.token_env);
            results = m_orchestrator->run_analyzer(inv, [&secret](LogStream, std::string_view line) {
                std::string text(line);
                scrub(text, secret);
                std::clog << "[analyzer] " << text << '\n';
            });
            loaded = m_orchestrator->load_previous(results);
        } else {
            return problem(400, "BadAction", "action must be \"run\" or \"load\"");
        }
        return ok({ { "status", "loaded" }, { "results_path", results.string() },
            { "pr_count", loaded->session.pull_requests.size() }, { "generation", loaded->generation } });
    } catch (const ProcessError& e) {
        return problem(500, "OrchestratorError", e.what(),
            { { "cause", error_code_name(e.code()) }, { "exit_code", e.exit_code() }, { "stderr_tail", e.stderr_tail() } });
    } catch (const Error& e) {
        return problem(500, "OrchestratorError", e.what(), { { "cause", error_code_name(e.code()) } });
    }
}

} // namespace hunkscope
