// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <hunkscope/locator.hpp>
#include <hunkscope/orchestrator.hpp>
#include <hunkscope/snapshot_fetcher.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace hunkscope {

// Service/orchestrator configuration file. Relative paths resolve against
// the directory holding the file. The token itself never lives here, only
// the name of the environment variable that carries it.
struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string cors_origin = "*";
    FetcherOptions fetcher;
    FetchPolicy default_policy = FetchPolicy::PreferCache;
    AlignParams align;
    AnalyzerInvocation analyzer;
    // Loaded at startup when set.
    std::optional<std::filesystem::path> session;
};

ServiceConfig parse_service_config(std::string_view document, const std::filesystem::path& base_dir = {});

// Throws Error(ConfigError) on unreadable or invalid files.
ServiceConfig load_service_config(const std::filesystem::path& path);

// Parses "host:port" (or a bare port).
void parse_listen_address(std::string_view text, std::string& host, int& port);

} // namespace hunkscope
