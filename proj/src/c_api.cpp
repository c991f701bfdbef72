// SPDX-License-Identifier: Apache-2.0
#include <hunkscope/hunkscope.h>

#include <hunkscope/api_service.hpp>
#include <hunkscope/config.hpp>
#include <hunkscope/error.hpp>
#include <hunkscope/json_codec.hpp>
#include <hunkscope/report.hpp>

#include <cstdlib>
#include <cstring>

using namespace hunkscope;

struct hs_session {
    Session session;
};

struct hs_fetcher {
    std::shared_ptr<SnapshotFetcher> fetcher;
};

struct hs_server {
    ServiceConfig config;
    std::unique_ptr<ApiService> service;
    std::unique_ptr<HttpServer> http;
};

namespace {

thread_local std::string last_error;

hs_status status_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::MalformedHeader:
    case ErrorCode::CountMismatch:
    case ErrorCode::TruncatedHunk:
        return HS_ERR_PARSE;
    case ErrorCode::SchemaError:
    case ErrorCode::HunkValidationError:
        return HS_ERR_SCHEMA;
    case ErrorCode::IoError:
        return HS_ERR_IO;
    case ErrorCode::InvalidArgument:
    case ErrorCode::MismatchedInputs:
        return HS_ERR_INVALID_ARGUMENT;
    case ErrorCode::NotFound:
        return HS_ERR_NOT_FOUND;
    case ErrorCode::RateLimited:
        return HS_ERR_RATE_LIMITED;
    case ErrorCode::AuthRequired:
        return HS_ERR_AUTH_REQUIRED;
    case ErrorCode::OfflineMiss:
        return HS_ERR_OFFLINE_MISS;
    case ErrorCode::NetworkError:
        return HS_ERR_NETWORK;
    case ErrorCode::EmptyTarget:
        return HS_ERR_EMPTY_TARGET;
    case ErrorCode::SpawnError:
    case ErrorCode::NonZeroExit:
    case ErrorCode::Timeout:
        return HS_ERR_PROCESS;
    case ErrorCode::ConfigError:
        return HS_ERR_CONFIG;
    case ErrorCode::BindError:
        return HS_ERR_BIND;
    }
    return HS_ERR_INTERNAL;
}

hs_status fail(hs_status status, std::string message)
{
    last_error = std::move(message);
    return status;
}

template <typename F>
hs_status guarded(F&& body)
{
    try {
        body();
        last_error.clear();
        return HS_OK;
    } catch (const Error& e) {
        return fail(status_for(e.code()), std::string(error_code_name(e.code())) + ": " + e.what());
    } catch (const std::bad_alloc&) {
        return fail(HS_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(HS_ERR_INTERNAL, e.what());
    }
}

char* copy_out(const std::string& text)
{
    auto* buffer = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buffer)
        throw std::bad_alloc();
    std::memcpy(buffer, text.data(), text.size() + 1);
    return buffer;
}

AlignParams to_params(const hs_align_params* p)
{
    AlignParams params;
    if (p)
        params = { p->tau_line, p->tau_region, p->exact_reward, p->fuzzy_reward, p->mismatch_penalty, p->gap_penalty };
    return params;
}

std::vector<Hunk> parse_any_diff(std::string_view text)
{
    auto first = text.find_first_not_of("\r\n");
    if (first != std::string_view::npos && text.substr(first, 2) != "@@") {
        std::vector<Hunk> hunks;
        for (auto& patch : parse_unified_diff(text))
            for (auto& hunk : patch.hunks)
                hunks.push_back(std::move(hunk));
        return hunks;
    }
    return parse_hunks(text);
}

} // namespace

extern "C" {

const char* hs_last_error_message(void)
{
    return last_error.c_str();
}

void hs_string_free(char* text)
{
    std::free(text);
}

const char* hs_version(void)
{
    return "0.1.0";
}

hs_align_params hs_align_params_default(void)
{
    AlignParams d;
    return { d.tau_line, d.tau_region, d.exact_reward, d.fuzzy_reward, d.mismatch_penalty, d.gap_penalty };
}

hs_status hs_session_load(const char* results_path, hs_session** out)
{
    if (!results_path || !out)
        return fail(HS_ERR_INVALID_ARGUMENT, "results_path and out are required");
    return guarded([&] { *out = new hs_session { load_session(results_path) }; });
}

void hs_session_free(hs_session* session)
{
    delete session;
}

size_t hs_session_pr_count(const hs_session* session)
{
    return session ? session->session.pull_requests.size() : 0;
}

hs_status hs_session_config_json(const hs_session* session, char** out)
{
    if (!session || !out)
        return fail(HS_ERR_INVALID_ARGUMENT, "session and out are required");
    return guarded([&] {
        const auto& cfg = session->session.config;
        nlohmann::json doc = { { "source_repo", cfg.source_repo }, { "target_repo", cfg.target_repo },
            { "divergence_date", cfg.divergence_date_text() } };
        *out = copy_out(dump_json(doc));
    });
}

hs_status hs_fetcher_create(const char* cache_dir, const char* fixture_dir, const char* token_env, hs_fetcher** out)
{
    if (!cache_dir || !*cache_dir || !out)
        return fail(HS_ERR_INVALID_ARGUMENT, "cache_dir and out are required");
    return guarded([&] {
        FetcherOptions options;
        options.cache_dir = cache_dir;
        if (fixture_dir && *fixture_dir)
            options.fixture_dir = std::filesystem::path(fixture_dir);
        if (token_env)
            options.token_env = token_env;
        *out = new hs_fetcher { std::make_shared<SnapshotFetcher>(options, make_https_transport()) };
    });
}

void hs_fetcher_free(hs_fetcher* fetcher)
{
    delete fetcher;
}

hs_status hs_fetcher_cache_stats(const hs_fetcher* fetcher, uint64_t* entries, uint64_t* bytes)
{
    if (!fetcher)
        return fail(HS_ERR_INVALID_ARGUMENT, "fetcher is required");
    return guarded([&] {
        auto stats = fetcher->fetcher->cache_stats();
        if (entries)
            *entries = stats.entries;
        if (bytes)
            *bytes = stats.bytes;
    });
}

hs_status hs_locate_report(const hs_session* session, hs_fetcher* fetcher, hs_fetch_policy policy,
    const hs_align_params* params, const char* classification, hs_format format, char** out, int* failures)
{
    if (!session || !fetcher || !out)
        return fail(HS_ERR_INVALID_ARGUMENT, "session, fetcher and out are required");
    if (policy < HS_POLICY_PREFER_CACHE || policy > HS_POLICY_OFFLINE_ONLY)
        return fail(HS_ERR_INVALID_ARGUMENT, "unknown fetch policy");
    return guarded([&] {
        LocateOptions options;
        options.policy = static_cast<FetchPolicy>(policy);
        options.params = to_params(params);
        if (classification && *classification)
            options.hunk_filter = Classification::from_code(classification);
        auto report = run_locate(session->session, *fetcher->fetcher, options);
        *out = copy_out(format == HS_FORMAT_TEXT ? report_text(report) : report_json(report));
        if (failures)
            *failures = static_cast<int>(report.failures.size());
    });
}

hs_status hs_locate_text(const char* diff, const char* target, const hs_align_params* params, char** out)
{
    if (!diff || !target || !out)
        return fail(HS_ERR_INVALID_ARGUMENT, "diff, target and out are required");
    return guarded([&] {
        auto snapshot = make_snapshot({ "local/text", "0000000", "target" }, target, SnapshotOrigin::Fixture);
        auto p = to_params(params);
        nlohmann::json result = nlohmann::json::array();
        for (const auto& hunk : parse_any_diff(diff))
            result.push_back(locate_all(hunk, snapshot, p));
        *out = copy_out(dump_json(result));
    });
}

hs_status hs_server_create(const char* config_path, hs_server** out)
{
    if (!config_path || !out)
        return fail(HS_ERR_INVALID_ARGUMENT, "config_path and out are required");
    return guarded([&] {
        auto server = std::make_unique<hs_server>();
        server->config = load_service_config(config_path);
        auto fetcher = std::make_shared<SnapshotFetcher>(server->config.fetcher, make_https_transport());
        auto orchestrator = std::make_shared<Orchestrator>();
        if (server->config.session)
            orchestrator->load_previous(*server->config.session);
        server->service = std::make_unique<ApiService>(server->config, fetcher, orchestrator);
        server->http = std::make_unique<HttpServer>(*server->service, server->config.cors_origin);
        *out = server.release();
    });
}

hs_status hs_server_start(hs_server* server, int port, int* bound_port)
{
    if (!server)
        return fail(HS_ERR_INVALID_ARGUMENT, "server is required");
    return guarded([&] {
        int bound = server->http->start(server->config.host, port < 0 ? server->config.port : port);
        if (bound_port)
            *bound_port = bound;
    });
}

void hs_server_stop(hs_server* server)
{
    if (server && server->http)
        server->http->stop();
}

void hs_server_free(hs_server* server)
{
    hs_server_stop(server);
    delete server;
}

} // extern "C"
