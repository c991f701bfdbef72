// SPDX-License-Identifier: Apache-2.0
#include <hunkscope/config.hpp>
#include <hunkscope/error.hpp>

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace hunkscope {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const fs::path& base, const std::string& value)
{
    fs::path p(value);
    if (p.is_relative() && !base.empty())
        return base / p;
    return p;
}

template <typename T>
T get_or(const json& object, const char* name, T fallback, const std::string& where)
{
    auto it = object.find(name);
    if (it == object.end() || it->is_null())
        return fallback;
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::ConfigError, where + "/" + name + ": wrong type");
    }
}

} // namespace

void parse_listen_address(std::string_view text, std::string& host, int& port)
{
    auto colon = text.rfind(':');
    std::string_view port_text = text;
    if (colon != std::string_view::npos) {
        host = std::string(text.substr(0, colon));
        port_text = text.substr(colon + 1);
    }
    int value = 0;
    if (port_text.empty())
        throw Error(ErrorCode::ConfigError, "listen address has no port: " + std::string(text));
    for (char c : port_text) {
        if (c < '0' || c > '9')
            throw Error(ErrorCode::ConfigError, "bad port in listen address: " + std::string(text));
        value = value * 10 + (c - '0');
        if (value > 65535)
            throw Error(ErrorCode::ConfigError, "port out of range: " + std::string(text));
    }
    port = value;
}

ServiceConfig parse_service_config(std::string_view document, const fs::path& base_dir)
{
    json doc = json::parse(document, nullptr, false);
    if (doc.is_discarded() || !doc.is_object())
        throw Error(ErrorCode::ConfigError, "config is not a JSON object");

    ServiceConfig config;
    if (auto listen = get_or<std::string>(doc, "listen", "", ""); !listen.empty())
        parse_listen_address(listen, config.host, config.port);
    config.cors_origin = get_or<std::string>(doc, "cors_origin", config.cors_origin, "");

    auto cache = get_or<std::string>(doc, "cache_dir", "", "");
    if (cache.empty())
        throw Error(ErrorCode::ConfigError, "/cache_dir: required");
    config.fetcher.cache_dir = resolve(base_dir, cache);
    if (auto fixtures = get_or<std::string>(doc, "fixture_dir", "", ""); !fixtures.empty())
        config.fetcher.fixture_dir = resolve(base_dir, fixtures);
    config.fetcher.token_env = get_or<std::string>(doc, "token_env", config.fetcher.token_env, "");
    config.fetcher.api_base = get_or<std::string>(doc, "api_base", config.fetcher.api_base, "");
    if (doc.contains("token"))
        throw Error(ErrorCode::ConfigError, "/token: tokens are read from the environment, name the variable in token_env");

    auto policy = get_or<std::string>(doc, "default_policy", policy_name(config.default_policy), "");
    auto parsed = parse_policy(policy);
    if (!parsed)
        throw Error(ErrorCode::ConfigError, "/default_policy: unknown policy " + policy);
    config.default_policy = *parsed;

    if (auto it = doc.find("align_params"); it != doc.end()) {
        if (!it->is_object())
            throw Error(ErrorCode::ConfigError, "/align_params: expected an object");
        auto& a = config.align;
        a.tau_line = get_or<double>(*it, "tau_line", a.tau_line, "/align_params");
        a.tau_region = get_or<double>(*it, "tau_region", a.tau_region, "/align_params");
        a.exact_reward = get_or<double>(*it, "exact_reward", a.exact_reward, "/align_params");
        a.fuzzy_reward = get_or<double>(*it, "fuzzy_reward", a.fuzzy_reward, "/align_params");
        a.mismatch_penalty = get_or<double>(*it, "mismatch_penalty", a.mismatch_penalty, "/align_params");
        a.gap_penalty = get_or<double>(*it, "gap_penalty", a.gap_penalty, "/align_params");
        if (a.tau_line < 0 || a.tau_line > 1 || a.tau_region < 0 || a.tau_region > 1)
            throw Error(ErrorCode::ConfigError, "/align_params: thresholds must lie in [0, 1]");
    }

    if (auto it = doc.find("analyzer"); it != doc.end()) {
        if (!it->is_object())
            throw Error(ErrorCode::ConfigError, "/analyzer: expected an object");
        auto& an = config.analyzer;
        an.command_template = get_or<std::string>(*it, "command", an.command_template, "/analyzer");
        an.executable = get_or<std::string>(*it, "executable", an.executable, "/analyzer");
        if (!an.executable.empty() && an.executable.find('/') != std::string::npos)
            an.executable = resolve(base_dir, an.executable).string();
        an.source_repo = get_or<std::string>(*it, "source_repo", an.source_repo, "/analyzer");
        an.target_repo = get_or<std::string>(*it, "target_repo", an.target_repo, "/analyzer");
        an.divergence_date = get_or<std::string>(*it, "divergence_date", an.divergence_date, "/analyzer");
        if (auto out = get_or<std::string>(*it, "output_dir", "", "/analyzer"); !out.empty())
            an.output_dir = resolve(base_dir, out);
        auto seconds = get_or<double>(*it, "timeout_seconds", 3600.0, "/analyzer");
        an.timeout = std::chrono::milliseconds(static_cast<long long>(seconds * 1000));
    }
    config.analyzer.token_env = config.fetcher.token_env;

    if (auto session = get_or<std::string>(doc, "session", "", ""); !session.empty())
        config.session = resolve(base_dir, session);
    return config;
}

ServiceConfig load_service_config(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::ConfigError, "cannot read config " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_service_config(buffer.str(), path.parent_path());
}

} // namespace hunkscope
