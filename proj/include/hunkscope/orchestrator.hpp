// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <hunkscope/classification_store.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace hunkscope {

struct AnalyzerInvocation {
    // Whitespace-separated argv template; double quotes group words.
    // Placeholders: {exe} {source} {target} {date} {out} {token_env}.
    std::string command_template = "{exe} --src {source} --tgt {target} --date {date} --out {out}";
    std::string executable;
    std::string source_repo;
    std::string target_repo;
    std::string divergence_date;
    // Name of the variable holding the token; the child inherits it.
    std::string token_env = "GITHUB_TOKEN";
    std::filesystem::path output_dir;
    std::chrono::milliseconds timeout = std::chrono::hours(1);
};

enum class LogStream { Stdout, Stderr };

using ProgressCallback = std::function<void(LogStream stream, std::string_view line)>;

// Argument vector for the analyzer. Throws Error(ConfigError) on unknown
// placeholders and Error(InvalidArgument) on malformed repos or dates.
std::vector<std::string> build_analyzer_argv(const AnalyzerInvocation& invocation);

// A session that has been loaded and published to readers.
struct LoadedSession {
    Session session;
    std::uint64_t generation = 0;
};

// Single active session; swaps are atomic for readers holding the old one.
class SessionRegistry {
public:
    std::shared_ptr<const LoadedSession> active() const;
    std::shared_ptr<const LoadedSession> publish(Session session);

private:
    mutable std::mutex m_mutex;
    std::shared_ptr<const LoadedSession> m_active;
    std::uint64_t m_next_generation = 1;
};

class Orchestrator {
public:
    explicit Orchestrator(std::shared_ptr<SessionRegistry> registry = std::make_shared<SessionRegistry>());

    // Spawns the analyzer, streams its output to `progress`, and returns the
    // output directory on exit status 0. One analyzer runs at a time.
    std::filesystem::path run_analyzer(const AnalyzerInvocation& invocation, const ProgressCallback& progress = {});

    // Loads a results path and makes it the active session.
    std::shared_ptr<const LoadedSession> load_previous(const std::filesystem::path& results_path);

    SessionRegistry& registry() { return *m_registry; }
    std::shared_ptr<SessionRegistry> shared_registry() const { return m_registry; }

private:
    std::shared_ptr<SessionRegistry> m_registry;
    std::mutex m_run_mutex;
};

} // namespace hunkscope
