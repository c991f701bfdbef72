// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hunkscope {

struct SnapshotKey {
    std::string repo;
    std::string commit;
    std::string path;

    auto operator<=>(const SnapshotKey&) const = default;
    std::string to_string() const;
};

// Throws Error(InvalidArgument) on empty components or a non-relative path.
void validate(const SnapshotKey& key);

enum class SnapshotOrigin { Network, Cache, Fixture };
enum class FetchPolicy { PreferCache, RefreshAlways, OfflineOnly };

const char* origin_name(SnapshotOrigin origin) noexcept;
const char* policy_name(FetchPolicy policy) noexcept;
std::optional<FetchPolicy> parse_policy(std::string_view name);

struct Snapshot {
    SnapshotKey key;
    std::vector<std::string> lines;
    bool final_newline = false;
    std::uint64_t byte_size = 0;
    std::string sha256;
    std::chrono::system_clock::time_point fetched_at;
    SnapshotOrigin origin = SnapshotOrigin::Fixture;

    std::string content() const;
};

Snapshot make_snapshot(SnapshotKey key, std::string_view content, SnapshotOrigin origin);

std::string sha256_hex(std::string_view data);

struct HttpRequest {
    std::string url;
    std::vector<std::pair<std::string, std::string>> headers;
};

struct HttpResponse {
    // 0 when the request never reached the server.
    int status = 0;
    std::string body;
    // Lower-cased header names.
    std::map<std::string, std::string> headers;
    std::string error;
};

class Transport {
public:
    virtual ~Transport() = default;
    virtual HttpResponse get(const HttpRequest& request) = 0;
};

// HTTPS client for the hosting platform's content API.
std::unique_ptr<Transport> make_https_transport();

// Test and audit transport: records every request it sees and answers via
// `handler` (or with a transport error when no handler is set).
class RecordingTransport : public Transport {
public:
    using Handler = std::function<HttpResponse(const HttpRequest&)>;

    explicit RecordingTransport(Handler handler = {});

    HttpResponse get(const HttpRequest& request) override;

    std::size_t request_count() const;
    std::vector<HttpRequest> requests() const;

private:
    Handler m_handler;
    mutable std::mutex m_mutex;
    std::vector<HttpRequest> m_requests;
};

struct CacheStats {
    std::uint64_t entries = 0;
    std::uint64_t bytes = 0;

    bool operator==(const CacheStats&) const = default;
};

// Content-addressed snapshot directory:
//   <root>/objects/<sha256>   raw file content
//   <root>/index.json         SnapshotKey -> sha256
// Fixture stores use the same layout.
class SnapshotStore {
public:
    explicit SnapshotStore(std::filesystem::path root);

    const std::filesystem::path& root() const { return m_root; }

    // Content for `key`, or nullopt on a miss or a corrupt object.
    std::optional<std::string> lookup(const SnapshotKey& key) const;

    // Writes the object and index entry via write-then-rename. Returns the hash.
    std::string put(const SnapshotKey& key, std::string_view content);

    CacheStats stats() const;

    std::map<SnapshotKey, std::string> index() const;

private:
    std::map<SnapshotKey, std::string> read_index() const;

    std::filesystem::path m_root;
    mutable std::mutex m_mutex;
};

struct FetcherOptions {
    std::filesystem::path cache_dir;
    std::optional<std::filesystem::path> fixture_dir;
    // Name of the environment variable holding the API token.
    std::string token_env = "GITHUB_TOKEN";
    std::string api_base = "https://api.github.com";
};

class SnapshotFetcher {
public:
    SnapshotFetcher(FetcherOptions options, std::shared_ptr<Transport> transport);

    Snapshot fetch(const SnapshotKey& key, FetchPolicy policy);

    CacheStats cache_stats() const;

    const FetcherOptions& options() const { return m_options; }

    std::string content_url(const SnapshotKey& key) const;

private:
    Snapshot fetch_network(const SnapshotKey& key);

    FetcherOptions m_options;
    std::shared_ptr<Transport> m_transport;
    SnapshotStore m_cache;
    std::optional<SnapshotStore> m_fixtures;
};

} // namespace hunkscope
