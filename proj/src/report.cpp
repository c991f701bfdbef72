// SPDX-License-Identifier: Apache-2.0
#include <hunkscope/error.hpp>
#include <hunkscope/json_codec.hpp>
#include <hunkscope/report.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <mutex>
#include <thread>

namespace hunkscope {

using nlohmann::json;

namespace {

struct FileJob {
    const ClassifiedPullRequest* pr;
    const ClassifiedFile* file;
    std::size_t file_index;
};

std::string format_confidence(double value)
{
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.3f", value);
    return buffer;
}

} // namespace

LocateReport run_locate(const Session& session, SnapshotFetcher& fetcher, const LocateOptions& options)
{
    std::vector<FileJob> jobs;
    for (const auto& pr : session.pull_requests) {
        for (std::size_t f = 0; f < pr.files.size(); ++f) {
            const auto& file = pr.files[f];
            bool wanted = std::any_of(file.hunks.begin(), file.hunks.end(),
                [&](const ClassifiedHunk& h) { return h.classification == options.hunk_filter; });
            if (wanted)
                jobs.push_back({ &pr, &file, f });
        }
    }

    std::vector<std::vector<ReportRecord>> results(jobs.size());
    std::vector<std::string> failures(jobs.size());
    std::atomic<std::size_t> next { 0 };

    auto worker = [&] {
        for (std::size_t k = next++; k < jobs.size(); k = next++) {
            const auto& job = jobs[k];
            try {
                auto snapshot = fetcher.fetch({ session.config.target_repo, job.file->target_commit, job.file->target_path },
                    options.policy);
                for (std::size_t h = 0; h < job.file->hunks.size(); ++h) {
                    const auto& hunk = job.file->hunks[h];
                    if (!(hunk.classification == options.hunk_filter))
                        continue;
                    ReportRecord record { job.pr->number, job.file->path, job.file_index, h, {} };
                    if (!snapshot.lines.empty())
                        record.match = locate(hunk.hunk, snapshot, options.params);
                    results[k].push_back(std::move(record));
                }
            } catch (const Error& e) {
                failures[k] = "PR #" + std::to_string(job.pr->number) + " " + job.file->path + ": "
                    + error_code_name(e.code()) + ": " + e.what();
                results[k].clear();
            }
        }
    };

    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(jobs.size(), 1)));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t)
            pool.emplace_back(worker);
        worker();
    }

    LocateReport report;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
        for (auto& record : results[k])
            report.records.push_back(std::move(record));
        if (!failures[k].empty())
            report.failures.push_back(std::move(failures[k]));
    }
    std::stable_sort(report.records.begin(), report.records.end(), [](const ReportRecord& a, const ReportRecord& b) {
        return std::tie(a.pr, a.file_index, a.hunk_index) < std::tie(b.pr, b.file_index, b.hunk_index);
    });
    return report;
}

std::string report_json(const LocateReport& report)
{
    json records = json::array();
    for (const auto& r : report.records) {
        json mapped = json::array();
        for (const auto& p : r.match.pairs)
            mapped.push_back({ { "source_old_line", p.source_old_line }, { "target_line", p.target_line } });
        bool found = r.match.match_kind != MatchKind::NotFound;
        records.push_back({
            { "pr", r.pr },
            { "file", r.file },
            { "hunk_index", r.hunk_index },
            { "match_kind", match_kind_name(r.match.match_kind) },
            { "target_start", found ? json(r.match.target_start) : json(nullptr) },
            { "target_end", found ? json(r.match.target_end) : json(nullptr) },
            { "confidence", r.match.confidence },
            { "mapped_lines", std::move(mapped) },
        });
    }
    json doc = { { "records", std::move(records) }, { "failures", report.failures } };
    return dump_json(doc, 2) + "\n";
}

std::string report_text(const LocateReport& report)
{
    std::string out;
    char line[512];
    std::snprintf(line, sizeof line, "%-8s %-5s %-9s %-13s %-10s %s\n", "PR", "HUNK", "KIND", "TARGET", "CONFIDENCE",
        "FILE");
    out += line;
    for (const auto& r : report.records) {
        std::string range = "-";
        if (r.match.match_kind != MatchKind::NotFound)
            range = std::to_string(r.match.target_start) + "-" + std::to_string(r.match.target_end);
        std::snprintf(line, sizeof line, "%-8llu %-5zu %-9s %-13s %-10s %s\n", static_cast<unsigned long long>(r.pr),
            r.hunk_index, match_kind_name(r.match.match_kind), range.c_str(), format_confidence(r.match.confidence).c_str(),
            r.file.c_str());
        out += line;
    }
    for (const auto& failure : report.failures)
        out += "FAILED " + failure + "\n";
    return out;
}

} // namespace hunkscope
