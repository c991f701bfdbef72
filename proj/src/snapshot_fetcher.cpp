// SPDX-License-Identifier: Apache-2.0
#include <hunkscope/error.hpp>
#include <hunkscope/snapshot_fetcher.hpp>

#include <json.hpp>
#include <openssl/evp.h>

#include <array>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

namespace hunkscope {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::optional<std::string> read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        return std::nullopt;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return std::move(buffer).str();
}

std::string unique_suffix()
{
    static std::atomic<std::uint64_t> counter { 0 };
    std::random_device rd;
    std::ostringstream out;
    out << std::hex << rd() << '-' << std::hash<std::thread::id> {}(std::this_thread::get_id()) << '-' << counter++;
    return out.str();
}

// Write-then-rename so readers never observe a partial file.
void write_atomically(const fs::path& target, std::string_view content)
{
    auto tmp_dir = target.parent_path().parent_path() / "tmp";
    if (target.parent_path().filename() != "objects")
        tmp_dir = target.parent_path() / "tmp";
    std::error_code ec;
    fs::create_directories(tmp_dir, ec);
    fs::create_directories(target.parent_path(), ec);
    auto tmp = tmp_dir / (target.filename().string() + "." + unique_suffix());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw Error(ErrorCode::IoError, "short write to " + tmp.string());
    }
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::IoError, "cannot move cache entry into " + target.string());
    }
}

bool is_hex(std::string_view s)
{
    for (char c : s) {
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F')))
            return false;
    }
    return true;
}

std::string percent_encode_path(std::string_view path)
{
    static const char* digits = "0123456789ABCDEF";
    std::string out;
    for (unsigned char c : path) {
        bool plain = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_'
            || c == '.' || c == '~' || c == '/';
        if (plain) {
            out += static_cast<char>(c);
        } else {
            out += '%';
            out += digits[c >> 4];
            out += digits[c & 0xF];
        }
    }
    return out;
}

std::optional<std::int64_t> header_int(const HttpResponse& response, const std::string& name)
{
    auto it = response.headers.find(name);
    if (it == response.headers.end())
        return std::nullopt;
    try {
        return std::stoll(it->second);
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

} // namespace

std::string SnapshotKey::to_string() const
{
    return repo + "@" + commit + ":" + path;
}

void validate(const SnapshotKey& key)
{
    if (key.repo.empty() || key.commit.empty() || key.path.empty())
        throw Error(ErrorCode::InvalidArgument, "snapshot key has an empty component: " + key.to_string());
    if (key.path.front() == '/' || key.path.find('\\') != std::string::npos)
        throw Error(ErrorCode::InvalidArgument, "snapshot path must be repository-relative with forward slashes: " + key.path);
    std::string_view rest = key.path;
    while (!rest.empty()) {
        auto slash = rest.find('/');
        auto segment = rest.substr(0, slash);
        if (segment == ".." || segment == "." || segment.empty())
            throw Error(ErrorCode::InvalidArgument, "snapshot path has an empty, '.' or '..' segment: " + key.path);
        if (slash == std::string_view::npos)
            break;
        rest.remove_prefix(slash + 1);
        if (rest.empty())
            throw Error(ErrorCode::InvalidArgument, "snapshot path ends with '/': " + key.path);
    }
}

const char* origin_name(SnapshotOrigin origin) noexcept
{
    switch (origin) {
    case SnapshotOrigin::Network:
        return "Network";
    case SnapshotOrigin::Cache:
        return "Cache";
    case SnapshotOrigin::Fixture:
        return "Fixture";
    }
    return "Fixture";
}

const char* policy_name(FetchPolicy policy) noexcept
{
    switch (policy) {
    case FetchPolicy::PreferCache:
        return "PreferCache";
    case FetchPolicy::RefreshAlways:
        return "RefreshAlways";
    case FetchPolicy::OfflineOnly:
        return "OfflineOnly";
    }
    return "PreferCache";
}

std::optional<FetchPolicy> parse_policy(std::string_view name)
{
    if (name == "PreferCache")
        return FetchPolicy::PreferCache;
    if (name == "RefreshAlways")
        return FetchPolicy::RefreshAlways;
    if (name == "OfflineOnly")
        return FetchPolicy::OfflineOnly;
    return std::nullopt;
}

std::string Snapshot::content() const
{
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i > 0)
            out += '\n';
        out += lines[i];
    }
    if (final_newline)
        out += '\n';
    return out;
}

Snapshot make_snapshot(SnapshotKey key, std::string_view content, SnapshotOrigin origin)
{
    Snapshot snapshot;
    snapshot.key = std::move(key);
    snapshot.byte_size = content.size();
    snapshot.sha256 = sha256_hex(content);
    snapshot.origin = origin;
    snapshot.fetched_at = std::chrono::system_clock::now();
    snapshot.final_newline = !content.empty() && content.back() == '\n';
    auto body = snapshot.final_newline ? content.substr(0, content.size() - 1) : content;
    if (!content.empty()) {
        std::size_t begin = 0;
        while (true) {
            auto end = body.find('\n', begin);
            if (end == std::string_view::npos) {
                snapshot.lines.emplace_back(body.substr(begin));
                break;
            }
            snapshot.lines.emplace_back(body.substr(begin, end - begin));
            begin = end + 1;
        }
    }
    return snapshot;
}

std::string sha256_hex(std::string_view data)
{
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest {};
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorCode::IoError, "SHA-256 digest failed");
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        out += digits[digest[i] >> 4];
        out += digits[digest[i] & 0xF];
    }
    return out;
}

RecordingTransport::RecordingTransport(Handler handler)
    : m_handler(std::move(handler))
{
}

HttpResponse RecordingTransport::get(const HttpRequest& request)
{
    {
        std::lock_guard lock(m_mutex);
        m_requests.push_back(request);
    }
    if (!m_handler) {
        HttpResponse response;
        response.error = "no transport configured";
        return response;
    }
    return m_handler(request);
}

std::size_t RecordingTransport::request_count() const
{
    std::lock_guard lock(m_mutex);
    return m_requests.size();
}

std::vector<HttpRequest> RecordingTransport::requests() const
{
    std::lock_guard lock(m_mutex);
    return m_requests;
}

SnapshotStore::SnapshotStore(fs::path root)
    : m_root(std::move(root))
{
}

std::map<SnapshotKey, std::string> SnapshotStore::read_index() const
{
    std::map<SnapshotKey, std::string> index;
    auto text = read_file(m_root / "index.json");
    if (!text)
        return index;
    json doc = json::parse(*text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array())
        throw Error(ErrorCode::IoError, "corrupt snapshot index " + (m_root / "index.json").string());
    for (const auto& entry : doc["entries"]) {
        if (!entry.is_object())
            continue;
        SnapshotKey key { entry.value("repo", ""), entry.value("commit", ""), entry.value("path", "") };
        auto hash = entry.value("sha256", "");
        if (hash.size() == 64 && is_hex(hash))
            index[key] = hash;
    }
    return index;
}

std::map<SnapshotKey, std::string> SnapshotStore::index() const
{
    std::lock_guard lock(m_mutex);
    return read_index();
}

std::optional<std::string> SnapshotStore::lookup(const SnapshotKey& key) const
{
    std::string hash;
    {
        std::lock_guard lock(m_mutex);
        auto index = read_index();
        auto it = index.find(key);
        if (it == index.end())
            return std::nullopt;
        hash = it->second;
    }
    auto content = read_file(m_root / "objects" / hash);
    if (!content || sha256_hex(*content) != hash)
        return std::nullopt;
    return content;
}

std::string SnapshotStore::put(const SnapshotKey& key, std::string_view content)
{
    auto hash = sha256_hex(content);
    auto object = m_root / "objects" / hash;
    std::error_code ec;
    if (!fs::exists(object, ec))
        write_atomically(object, content);

    std::lock_guard lock(m_mutex);
    auto index = read_index();
    index[key] = hash;
    json entries = json::array();
    for (const auto& [k, h] : index)
        entries.push_back({ { "repo", k.repo }, { "commit", k.commit }, { "path", k.path }, { "sha256", h } });
    json doc = { { "version", 1 }, { "entries", std::move(entries) } };
    write_atomically(m_root / "index.json", doc.dump(2) + "\n");
    return hash;
}

CacheStats SnapshotStore::stats() const
{
    CacheStats stats;
    auto objects = m_root / "objects";
    std::error_code ec;
    if (!fs::is_directory(objects, ec))
        return stats;
    for (fs::directory_iterator it(objects, ec), end; !ec && it != end; it.increment(ec)) {
        if (!it->is_regular_file())
            continue;
        ++stats.entries;
        stats.bytes += it->file_size();
    }
    if (ec)
        throw Error(ErrorCode::IoError, "cannot scan " + objects.string() + ": " + ec.message());
    return stats;
}

SnapshotFetcher::SnapshotFetcher(FetcherOptions options, std::shared_ptr<Transport> transport)
    : m_options(std::move(options))
    , m_transport(std::move(transport))
    , m_cache(m_options.cache_dir)
{
    if (m_options.fixture_dir)
        m_fixtures.emplace(*m_options.fixture_dir);
}

std::string SnapshotFetcher::content_url(const SnapshotKey& key) const
{
    return m_options.api_base + "/repos/" + key.repo + "/contents/" + percent_encode_path(key.path)
        + "?ref=" + percent_encode_path(key.commit);
}

Snapshot SnapshotFetcher::fetch(const SnapshotKey& key, FetchPolicy policy)
{
    validate(key);
    if (policy != FetchPolicy::RefreshAlways) {
        if (auto content = m_cache.lookup(key))
            return make_snapshot(key, *content, SnapshotOrigin::Cache);
        if (m_fixtures) {
            if (auto content = m_fixtures->lookup(key))
                return make_snapshot(key, *content, SnapshotOrigin::Fixture);
        }
    }
    if (policy == FetchPolicy::OfflineOnly)
        throw FetchError(ErrorCode::OfflineMiss, "no cached or fixture snapshot for " + key.to_string());
    return fetch_network(key);
}

Snapshot SnapshotFetcher::fetch_network(const SnapshotKey& key)
{
    if (!m_transport)
        throw FetchError(ErrorCode::NetworkError, "no network transport configured");

    HttpRequest request;
    request.url = content_url(key);
    request.headers.emplace_back("Accept", "application/vnd.github.raw+json");
    request.headers.emplace_back("User-Agent", "hunkscope");
    request.headers.emplace_back("X-GitHub-Api-Version", "2022-11-28");
    if (!m_options.token_env.empty()) {
        if (const char* token = std::getenv(m_options.token_env.c_str()); token && *token)
            request.headers.emplace_back("Authorization", std::string("Bearer ") + token);
    }

    auto response = m_transport->get(request);
    const auto where = key.to_string();
    switch (response.status) {
    case 200: {
        m_cache.put(key, response.body);
        return make_snapshot(key, response.body, SnapshotOrigin::Network);
    }
    case 0:
        throw FetchError(ErrorCode::NetworkError, "request for " + where + " failed: " + response.error);
    case 404:
        throw FetchError(ErrorCode::NotFound, "platform has no " + where);
    case 401:
        throw FetchError(ErrorCode::AuthRequired, "platform rejected the credentials for " + where);
    case 403:
    case 429: {
        auto remaining = header_int(response, "x-ratelimit-remaining");
        if (response.status == 429 || (remaining && *remaining == 0)) {
            auto reset = header_int(response, "x-ratelimit-reset");
            if (!reset) {
                if (auto retry = header_int(response, "retry-after")) {
                    auto now = std::chrono::duration_cast<std::chrono::seconds>(
                        std::chrono::system_clock::now().time_since_epoch());
                    reset = now.count() + *retry;
                }
            }
            throw FetchError(ErrorCode::RateLimited, "rate limited while fetching " + where, reset);
        }
        throw FetchError(ErrorCode::AuthRequired, "access to " + where + " requires a valid token");
    }
    default:
        throw FetchError(ErrorCode::NetworkError, "unexpected HTTP " + std::to_string(response.status) + " for " + where);
    }
}

CacheStats SnapshotFetcher::cache_stats() const
{
    return m_cache.stats();
}

} // namespace hunkscope
