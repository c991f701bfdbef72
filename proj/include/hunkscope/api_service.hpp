// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <hunkscope/config.hpp>
#include <hunkscope/orchestrator.hpp>
#include <hunkscope/snapshot_fetcher.hpp>

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

namespace hunkscope {

struct ApiRequest {
    std::string method = "GET";
    std::string path;
    std::multimap<std::string, std::string> query;
    std::string body;
};

struct ApiResponse {
    int status = 200;
    // Serialized JSON.
    std::string body;
};

// Transport-independent JSON API. The HTTP server below only adapts
// requests into `handle`.
class ApiService {
public:
    ApiService(ServiceConfig config, std::shared_ptr<SnapshotFetcher> fetcher,
        std::shared_ptr<Orchestrator> orchestrator = std::make_shared<Orchestrator>());
    ~ApiService();

    ApiResponse handle(const ApiRequest& request);

    Orchestrator& orchestrator() { return *m_orchestrator; }
    const ServiceConfig& config() const { return m_config; }

private:
    struct Memo;

    ApiResponse route(const ApiRequest& request);
    ApiResponse get_session();
    ApiResponse get_prs(const ApiRequest& request);
    ApiResponse get_files(std::uint64_t pr);
    ApiResponse get_hunks(std::uint64_t pr, std::size_t file);
    ApiResponse get_target(std::uint64_t pr, std::size_t file, const ApiRequest& request);
    ApiResponse post_orchestrate(const ApiRequest& request);

    ServiceConfig m_config;
    std::shared_ptr<SnapshotFetcher> m_fetcher;
    std::shared_ptr<Orchestrator> m_orchestrator;
    std::unique_ptr<Memo> m_memo;
};

// HTTP/1.1 front end for ApiService.
class HttpServer {
public:
    HttpServer(ApiService& service, std::string cors_origin);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Binds and starts serving on a background thread. Port 0 picks an
    // ephemeral port. Returns the bound port; throws Error(BindError).
    int start(const std::string& host, int port);

    void stop();

    bool running() const;

private:
    struct Impl;
    std::unique_ptr<Impl> m_impl;
};

} // namespace hunkscope
