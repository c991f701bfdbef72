// SPDX-License-Identifier: Apache-2.0
#include <hunkscope/error.hpp>
#include <hunkscope/orchestrator.hpp>

#include <algorithm>
#include <array>
#include <cerrno>
#include <csignal>
#include <cstring>
#include <deque>
#include <filesystem>
#include <poll.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

extern char** environ;

namespace hunkscope {

namespace {

std::vector<std::string> split_template(std::string_view text)
{
    std::vector<std::string> words;
    std::string current;
    bool in_word = false;
    bool quoted = false;
    for (char c : text) {
        if (c == '"') {
            quoted = !quoted;
            in_word = true;
            continue;
        }
        if (!quoted && (c == ' ' || c == '\t' || c == '\n')) {
            if (in_word)
                words.push_back(std::move(current));
            current.clear();
            in_word = false;
            continue;
        }
        current += c;
        in_word = true;
    }
    if (quoted)
        throw Error(ErrorCode::ConfigError, "unbalanced quote in analyzer command template");
    if (in_word)
        words.push_back(std::move(current));
    return words;
}

std::string substitute(const std::string& word, const AnalyzerInvocation& inv)
{
    std::string out;
    std::size_t i = 0;
    while (i < word.size()) {
        if (word[i] != '{') {
            out += word[i++];
            continue;
        }
        auto close = word.find('}', i);
        if (close == std::string::npos)
            throw Error(ErrorCode::ConfigError, "unterminated placeholder in '" + word + "'");
        auto name = word.substr(i + 1, close - i - 1);
        if (name == "exe")
            out += inv.executable;
        else if (name == "source")
            out += inv.source_repo;
        else if (name == "target")
            out += inv.target_repo;
        else if (name == "date")
            out += inv.divergence_date;
        else if (name == "out")
            out += inv.output_dir.string();
        else if (name == "token_env")
            out += inv.token_env;
        else
            throw Error(ErrorCode::ConfigError, "unknown placeholder {" + name + "} in analyzer command template");
        i = close + 1;
    }
    return out;
}

// Splits a byte stream into lines for the progress callback.
class LineSplitter {
public:
    LineSplitter(LogStream stream, const ProgressCallback& progress, std::deque<std::string>* tail)
        : m_stream(stream)
        , m_progress(progress)
        , m_tail(tail)
    {
    }

    void feed(std::string_view chunk)
    {
        m_buffer.append(chunk);
        std::size_t pos;
        while ((pos = m_buffer.find('\n')) != std::string::npos) {
            emit(m_buffer.substr(0, pos));
            m_buffer.erase(0, pos + 1);
        }
    }

    void finish()
    {
        if (!m_buffer.empty())
            emit(m_buffer);
        m_buffer.clear();
    }

private:
    void emit(const std::string& line)
    {
        if (m_progress)
            m_progress(m_stream, line);
        if (m_tail) {
            m_tail->push_back(line);
            if (m_tail->size() > 20)
                m_tail->pop_front();
        }
    }

    LogStream m_stream;
    const ProgressCallback& m_progress;
    std::deque<std::string>* m_tail;
    std::string m_buffer;
};

struct Pipe {
    int read_end = -1;
    int write_end = -1;

    Pipe()
    {
        int fds[2];
        if (::pipe(fds) != 0)
            throw ProcessError(ErrorCode::SpawnError, std::string("pipe: ") + std::strerror(errno));
        read_end = fds[0];
        write_end = fds[1];
    }
    ~Pipe()
    {
        close_read();
        close_write();
    }
    Pipe(const Pipe&) = delete;
    Pipe& operator=(const Pipe&) = delete;

    void close_read()
    {
        if (read_end >= 0)
            ::close(read_end);
        read_end = -1;
    }
    void close_write()
    {
        if (write_end >= 0)
            ::close(write_end);
        write_end = -1;
    }
};

class SpawnActions {
public:
    SpawnActions() { posix_spawn_file_actions_init(&m_actions); }
    ~SpawnActions() { posix_spawn_file_actions_destroy(&m_actions); }
    SpawnActions(const SpawnActions&) = delete;
    SpawnActions& operator=(const SpawnActions&) = delete;
    posix_spawn_file_actions_t* get() { return &m_actions; }

private:
    posix_spawn_file_actions_t m_actions;
};

class SpawnAttributes {
public:
    SpawnAttributes()
    {
        posix_spawnattr_init(&m_attr);
        // Own process group so a timeout can take down the whole tree.
        posix_spawnattr_setflags(&m_attr, POSIX_SPAWN_SETPGROUP);
        posix_spawnattr_setpgroup(&m_attr, 0);
    }
    ~SpawnAttributes() { posix_spawnattr_destroy(&m_attr); }
    SpawnAttributes(const SpawnAttributes&) = delete;
    SpawnAttributes& operator=(const SpawnAttributes&) = delete;
    posix_spawnattr_t* get() { return &m_attr; }

private:
    posix_spawnattr_t m_attr;
};

std::string join_tail(const std::deque<std::string>& tail)
{
    std::string out;
    for (const auto& line : tail) {
        out += line;
        out += '\n';
    }
    return out;
}

} // namespace

std::vector<std::string> build_analyzer_argv(const AnalyzerInvocation& invocation)
{
    if (invocation.executable.empty())
        throw Error(ErrorCode::InvalidArgument, "analyzer executable is not set");
    if (!is_repo_id(invocation.source_repo))
        throw Error(ErrorCode::InvalidArgument, "source repo must be owner/name: " + invocation.source_repo);
    if (!is_repo_id(invocation.target_repo))
        throw Error(ErrorCode::InvalidArgument, "target repo must be owner/name: " + invocation.target_repo);
    parse_iso_date(invocation.divergence_date);
    if (invocation.output_dir.empty())
        throw Error(ErrorCode::InvalidArgument, "analyzer output directory is not set");

    auto words = split_template(invocation.command_template);
    if (words.empty())
        throw Error(ErrorCode::ConfigError, "analyzer command template is empty");
    std::vector<std::string> argv;
    argv.reserve(words.size());
    for (const auto& word : words)
        argv.push_back(substitute(word, invocation));
    return argv;
}

std::shared_ptr<const LoadedSession> SessionRegistry::active() const
{
    std::lock_guard lock(m_mutex);
    return m_active;
}

std::shared_ptr<const LoadedSession> SessionRegistry::publish(Session session)
{
    auto loaded = std::make_shared<LoadedSession>();
    loaded->session = std::move(session);
    std::shared_ptr<const LoadedSession> previous;
    {
        std::lock_guard lock(m_mutex);
        loaded->generation = m_next_generation++;
        previous = std::exchange(m_active, loaded);
    }
    // `previous` is released here, outside the lock.
    return loaded;
}

Orchestrator::Orchestrator(std::shared_ptr<SessionRegistry> registry)
    : m_registry(std::move(registry))
{
}

std::shared_ptr<const LoadedSession> Orchestrator::load_previous(const std::filesystem::path& results_path)
{
    auto session = load_session(results_path);
    return m_registry->publish(std::move(session));
}

std::filesystem::path Orchestrator::run_analyzer(const AnalyzerInvocation& invocation, const ProgressCallback& progress)
{
    auto argv = build_analyzer_argv(invocation);
    std::lock_guard run_lock(m_run_mutex);

    std::error_code ec;
    std::filesystem::create_directories(invocation.output_dir, ec);

    Pipe out;
    Pipe err;
    SpawnActions actions;
    posix_spawn_file_actions_adddup2(actions.get(), out.write_end, STDOUT_FILENO);
    posix_spawn_file_actions_adddup2(actions.get(), err.write_end, STDERR_FILENO);
    posix_spawn_file_actions_addclose(actions.get(), out.read_end);
    posix_spawn_file_actions_addclose(actions.get(), err.read_end);
    SpawnAttributes attributes;

    std::vector<char*> raw;
    for (auto& arg : argv)
        raw.push_back(arg.data());
    raw.push_back(nullptr);

    pid_t pid = 0;
    int rc = posix_spawnp(&pid, raw[0], actions.get(), attributes.get(), raw.data(), environ);
    if (rc != 0)
        throw ProcessError(ErrorCode::SpawnError, "cannot start analyzer '" + argv[0] + "': " + std::strerror(rc));
    out.close_write();
    err.close_write();

    std::deque<std::string> stderr_tail;
    LineSplitter out_lines(LogStream::Stdout, progress, nullptr);
    LineSplitter err_lines(LogStream::Stderr, progress, &stderr_tail);

    const auto deadline = std::chrono::steady_clock::now() + invocation.timeout;
    bool timed_out = false;
    std::array<char, 4096> buffer {};
    while (out.read_end >= 0 || err.read_end >= 0) {
        auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (remaining.count() <= 0) {
            timed_out = true;
            break;
        }
        pollfd fds[2];
        nfds_t count = 0;
        if (out.read_end >= 0)
            fds[count++] = { out.read_end, POLLIN, 0 };
        if (err.read_end >= 0)
            fds[count++] = { err.read_end, POLLIN, 0 };
        int ready = ::poll(fds, count, static_cast<int>(std::min<long long>(remaining.count(), 1000)));
        if (ready < 0 && errno != EINTR)
            break;
        for (nfds_t k = 0; k < count; ++k) {
            if (!(fds[k].revents & (POLLIN | POLLHUP | POLLERR)))
                continue;
            auto n = ::read(fds[k].fd, buffer.data(), buffer.size());
            bool is_out = fds[k].fd == out.read_end;
            if (n > 0) {
                (is_out ? out_lines : err_lines).feed(std::string_view(buffer.data(), static_cast<std::size_t>(n)));
            } else if (n == 0 || (n < 0 && errno != EINTR && errno != EAGAIN)) {
                if (is_out)
                    out.close_read();
                else
                    err.close_read();
            }
        }
    }

    int status = 0;
    if (timed_out) {
        ::kill(-pid, SIGKILL);
        ::waitpid(pid, &status, 0);
        throw ProcessError(ErrorCode::Timeout,
            "analyzer did not finish within " + std::to_string(invocation.timeout.count()) + " ms", -1,
            join_tail(stderr_tail));
    }
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    out_lines.finish();
    err_lines.finish();

    int exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
    if (exit_code != 0)
        throw ProcessError(ErrorCode::NonZeroExit, "analyzer exited with status " + std::to_string(exit_code), exit_code,
            join_tail(stderr_tail));
    return invocation.output_dir;
}

} // namespace hunkscope
