// SPDX-License-Identifier: Apache-2.0
#include <hunkscope/hunkscope.h>

#include <CLI11.hpp>

#include <csignal>
#include <cstdio>
#include <string>

namespace {

constexpr int exit_ok = 0;
constexpr int exit_failed = 1;
constexpr int exit_usage = 2;

int diagnose(const char* what)
{
    std::fprintf(stderr, "hunkscope: %s: %s\n", what, hs_last_error_message());
    return exit_failed;
}

struct LocateArgs {
    std::string classifications;
    std::string cache_dir;
    std::string fixture_dir;
    std::string classification = "MO";
    std::string format = "json";
    bool offline = false;
    hs_align_params params = hs_align_params_default();
};

int cmd_locate(const LocateArgs& args)
{
    hs_session* session = nullptr;
    if (hs_session_load(args.classifications.c_str(), &session) != HS_OK)
        return diagnose("cannot load classifications");

    hs_fetcher* fetcher = nullptr;
    if (hs_fetcher_create(args.cache_dir.c_str(), args.fixture_dir.empty() ? nullptr : args.fixture_dir.c_str(), nullptr,
            &fetcher)
        != HS_OK) {
        hs_session_free(session);
        return diagnose("cannot open cache");
    }

    char* report = nullptr;
    int failures = 0;
    auto policy = args.offline ? HS_POLICY_OFFLINE_ONLY : HS_POLICY_PREFER_CACHE;
    auto format = args.format == "text" ? HS_FORMAT_TEXT : HS_FORMAT_JSON;
    auto status = hs_locate_report(session, fetcher, policy, &args.params, args.classification.c_str(), format, &report,
        &failures);
    hs_fetcher_free(fetcher);
    hs_session_free(session);
    if (status != HS_OK)
        return diagnose("locate failed");

    std::fputs(report, stdout);
    hs_string_free(report);
    if (failures > 0) {
        std::fprintf(stderr, "hunkscope: %d file(s) could not be fetched\n", failures);
        return exit_failed;
    }
    return exit_ok;
}

int cmd_serve(const std::string& config, int port)
{
    // Block before any thread starts so only sigwait sees these.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    hs_server* server = nullptr;
    if (hs_server_create(config.c_str(), &server) != HS_OK)
        return diagnose("cannot start service");
    int bound = 0;
    if (hs_server_start(server, port, &bound) != HS_OK) {
        hs_server_free(server);
        return diagnose("cannot start service");
    }
    std::fprintf(stderr, "hunkscope: listening on port %d\n", bound);

    int received = 0;
    sigwait(&signals, &received);
    std::fprintf(stderr, "hunkscope: shutting down\n");
    hs_server_free(server);
    return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app { "Locate patch hunks in a diverged fork" };
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(hs_version()));

    LocateArgs locate;
    auto* loc = app.add_subcommand("locate", "Localize classified hunks and print a report");
    loc->add_option("--classifications", locate.classifications, "Session document or results directory")
        ->required()
        ->check(CLI::ExistingPath);
    loc->add_option("--cache-dir", locate.cache_dir, "Snapshot cache directory")->required();
    loc->add_option("--fixture-dir", locate.fixture_dir, "Read-only snapshot store consulted after the cache")
        ->check(CLI::ExistingDirectory);
    loc->add_flag("--offline", locate.offline, "Never touch the network");
    loc->add_option("--format", locate.format, "Report format")->check(CLI::IsMember({ "json", "text" }));
    loc->add_option("--classification", locate.classification, "Hunk classification to localize");
    loc->add_option("--tau-line", locate.params.tau_line, "Per-line similarity threshold")->check(CLI::Range(0.0, 1.0));
    loc->add_option("--tau-region", locate.params.tau_region, "Region acceptance threshold")->check(CLI::Range(0.0, 1.0));

    std::string config;
    int port = -1;
    auto* serve = app.add_subcommand("serve", "Run the JSON API until interrupted");
    serve->add_option("--config", config, "Service configuration file")->required()->check(CLI::ExistingFile);
    serve->add_option("--port", port, "Override the configured port (0 picks a free one)")->check(CLI::Range(0, 65535));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    if (loc->parsed())
        return cmd_locate(locate);
    return cmd_serve(config, port);
}
