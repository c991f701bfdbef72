// SPDX-License-Identifier: Apache-2.0
// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <httplib.h>

#include <hunkscope/api_service.hpp>
#include <hunkscope/classification_store.hpp>
#include <hunkscope/diff_model.hpp>
#include <hunkscope/error.hpp>
#include <hunkscope/highlighter.hpp>
#include <hunkscope/locator.hpp>

#include "support/generators.hpp"
#include "support/harness.hpp"
#include "support/oracles.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

using namespace hunkscope;
using nlohmann::json;

namespace {

// Collects the first few problems; a criterion passes with none.
class Problems {
public:
    void add(const std::string& what)
    {
        if (m_count++ < 3)
            m_first += (m_first.empty() ? "" : "; ") + what;
    }
    bool ok() const { return m_count == 0; }
    std::string summary() const { return std::to_string(m_count) + " problem(s): " + m_first; }

private:
    int m_count = 0;
    std::string m_first;
};

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::vector<std::string> texts(const std::vector<NumberedLine>& lines)
{
    std::vector<std::string> out;
    for (const auto& l : lines)
        out.push_back(l.text);
    return out;
}

std::vector<std::string> fillers(std::size_t from, std::size_t count)
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(hstest::filler_line(from + i));
    return out;
}

std::vector<RegionMatch> by_start(std::vector<RegionMatch> matches)
{
    std::sort(matches.begin(), matches.end(),
        [](const RegionMatch& a, const RegionMatch& b) { return a.target_start < b.target_start; });
    return matches;
}

Snapshot kafka_target()
{
    SnapshotKey key { "linkedin/kafka", "fdb9fd0", hstest::kafka_path };
    auto content = SnapshotStore(hstest::kafka_dir() / "store").lookup(key);
    if (!content)
        throw std::runtime_error("fixture snapshot missing");
    return make_snapshot(key, *content, SnapshotOrigin::Fixture);
}

// Lines 545 and 546 hold the removed declaration in the target fixture.
bool kafka_mapping_ok(const RegionMatch& m, Problems& problems)
{
    bool ok = m.match_kind == MatchKind::Shifted && m.confidence == 1.0;
    std::vector<std::pair<LineNumber, LineNumber>> removed;
    for (const auto& p : m.pairs)
        if (p.kind_of_source == LineKind::Removed)
            removed.emplace_back(p.source_old_line, p.target_line);
    // The third removed line is the blank separator.
    ok &= removed.size() == 3 && removed[0] == std::pair<LineNumber, LineNumber> { 586, 545 }
        && removed[1] == std::pair<LineNumber, LineNumber> { 587, 546 };
    if (!ok)
        problems.add(std::string("mapping ") + match_kind_name(m.match_kind) + " confidence " + std::to_string(m.confidence));
    return ok;
}

Outcome criterion_1()
{
    Problems problems;
    auto session = load_session(hstest::kafka_dir());
    const auto& hunk = session.pull_requests.at(0).files.at(0).hunks.at(0).hunk;
    if (!(hunk.header == HunkHeader { 584, 9, 584, 6 }))
        problems.add("header differs");
    auto target = kafka_target();
    auto m = locate(hunk, target, AlignParams {});
    kafka_mapping_ok(m, problems);
    for (LineNumber line : { 545u, 546u })
        if (target.lines.at(line - 1).find(line == 545 ? "prepareBatchForRestore" : "WriteBatch batch") == std::string::npos)
            problems.add("target line " + std::to_string(line) + " is not the removed declaration");
    return { problems.ok(), problems.ok() ? "header (584, 9, 584, 6); 586->545, 587->546; Shifted; confidence 1.0"
                                          : problems.summary() };
}

Outcome criterion_2()
{
    Problems problems;
    hstest::Rng rng(20220602);
    for (int n = 0; n < 1000; ++n) {
        auto diff = hstest::random_diff(rng);
        auto text = serialize(diff);
        try {
            auto parsed = parse_unified_diff(text);
            if (parsed != diff || serialize(parsed) != text)
                problems.add("case " + std::to_string(n) + " does not round-trip");
            for (const auto& patch : parsed)
                for (const auto& h : patch.hunks)
                    if (auto p = hstest::recount_problem(h); !p.empty())
                        problems.add("case " + std::to_string(n) + ": " + p);
        } catch (const Error& e) {
            problems.add("case " + std::to_string(n) + ": " + e.what());
        }
    }
    return { problems.ok(), problems.ok() ? "1000 diffs round-trip, counts agree" : problems.summary() };
}

Outcome criterion_3()
{
    Problems problems;
    hstest::Rng rng(3);
    AlignParams params;
    constexpr int cases = 600;
    int found = 0;
    for (int n = 0; n < cases; ++n) {
        auto rows = hstest::pick(rng, 1, 8);
        auto cols = hstest::pick(rng, 1, 20);
        std::vector<std::string> pre;
        std::vector<std::string> target;
        for (std::size_t i = 0; i < rows; ++i)
            pre.push_back(hstest::code_line(rng));
        for (std::size_t j = 0; j < cols; ++j)
            target.push_back(hstest::coin(rng, 0.4) ? pre[hstest::pick(rng, 0, rows - 1)] : hstest::code_line(rng));
        std::vector<double> sim(rows * cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j)
                sim[i * cols + j] = hstest::jaccard_oracle(pre[i], target[j]);

        auto lib = align(pre, target, params);
        auto ref = hstest::align_oracle(sim, rows, cols, params);
        bool same = lib.has_value() == ref.has_value()
            && (!lib
                || (lib->target_begin == ref->target_begin && lib->target_end == ref->target_end
                    && std::abs(lib->score - ref->score) < 1e-9));
        found += lib.has_value();
        if (!same)
            problems.add("case " + std::to_string(n));
    }
    if (found < cases / 2)
        problems.add("only " + std::to_string(found) + " instances had an alignment");
    return { problems.ok(),
        problems.ok() ? std::to_string(cases) + " instances agree with the exhaustive oracle (" + std::to_string(found)
                + " aligned)"
                      : problems.summary() };
}

Outcome criterion_4()
{
    Problems problems;
    hstest::Rng rng(4);
    hstest::HunkShape shape { 8, false, false };
    int identity = 0;
    int shifted = 0;
    for (int n = 0; n < 200; ++n) {
        auto old_start = static_cast<LineNumber>(hstest::pick(rng, 1, 40));
        auto hunk = hstest::random_hunk(rng, old_start, old_start, shape);
        auto pre = texts(pre_image(hunk));
        if (pre.empty())
            continue;

        // Identity: the pre-image at its declared place.
        auto target = fillers(0, old_start - 1);
        target.insert(target.end(), pre.begin(), pre.end());
        auto tail = fillers(1000, hstest::pick(rng, 0, 10));
        target.insert(target.end(), tail.begin(), tail.end());
        auto m = locate(hunk, target, {});
        ++identity;
        if (m.match_kind != MatchKind::Exact || m.confidence != 1.0 || m.target_start != old_start)
            problems.add("identity case " + std::to_string(n));

        // Noisy target for shift, determinism and monotonicity.
        std::vector<std::string> noisy;
        for (int copy = 0; copy < 2; ++copy) {
            for (std::size_t j = 0, k = hstest::pick(rng, 0, 6); j < k; ++j)
                noisy.push_back(hstest::code_line(rng));
            for (const auto& line : pre)
                noisy.push_back(hstest::coin(rng, 0.2) ? hstest::code_line(rng) : line);
        }
        AlignParams params;
        auto base = locate_all(hunk, noisy, params);
        if (locate_all(hunk, noisy, params) != base)
            problems.add("case " + std::to_string(n) + " not deterministic");
        for (LineNumber k : { 1u, 37u, 500u }) {
            auto moved = fillers(5000, k);
            moved.insert(moved.end(), noisy.begin(), noisy.end());
            auto got = by_start(locate_all(hunk, moved, params));
            auto want = by_start(base);
            bool same = got.size() == want.size();
            for (std::size_t i = 0; same && i < got.size(); ++i) {
                auto w = want[i];
                w.target_start += k;
                w.target_end += k;
                for (auto& p : w.pairs)
                    p.target_line += k;
                if (w.insertion_anchor)
                    *w.insertion_anchor += k;
                auto g = got[i];
                g.match_kind = w.match_kind;
                same = g == w;
            }
            if (!same)
                problems.add("case " + std::to_string(n) + " shift " + std::to_string(k));
        }
        ++shifted;
        params.tau_region = 0.0;
        auto previous = by_start(locate_all(hunk, noisy, params));
        for (int step = 1; step <= 20; ++step) {
            params.tau_region = step / 20.0;
            auto accepted = by_start(locate_all(hunk, noisy, params));
            for (const auto& a : accepted)
                if (std::find(previous.begin(), previous.end(), a) == previous.end())
                    problems.add("case " + std::to_string(n) + " tau_region " + std::to_string(params.tau_region));
            previous = accepted;
        }
    }
    return { problems.ok(),
        problems.ok() ? std::to_string(identity) + " identity and " + std::to_string(shifted)
                + " shift/determinism/monotonicity cases hold"
                      : problems.summary() };
}

Outcome criterion_5()
{
    Problems problems;
    hstest::Rng rng(5);
    for (int n = 0; n < 1000; ++n) {
        auto hunk = hstest::random_hunk(rng, static_cast<LineNumber>(hstest::pick(rng, 1, 500)), 1, { 40, false, false });
        if (auto p = hstest::partition_problem(hunk, hunk_spans(hunk)); !p.empty())
            problems.add("case " + std::to_string(n) + ": " + p);
    }
    return { problems.ok(), problems.ok() ? "1000 hunks partitioned with sound colors" : problems.summary() };
}

Outcome criterion_6()
{
    Problems problems;
    hstest::TempDir dir;
    ServiceConfig config;
    config.fetcher.cache_dir = dir / "cache";
    config.fetcher.fixture_dir = hstest::kafka_dir() / "store";
    config.default_policy = FetchPolicy::OfflineOnly;
    auto transport = hstest::silent_transport();
    ApiService service(config, std::make_shared<SnapshotFetcher>(config.fetcher, transport));
    HttpServer server(service, "*");
    int port = server.start("127.0.0.1", 0);
    httplib::Client client("127.0.0.1", port);

    auto get = [&](const std::string& path, int want) -> json {
        auto r = client.Get(path);
        if (!r) {
            problems.add(path + ": no response");
            return nullptr;
        }
        if (r->status != want)
            problems.add(path + ": status " + std::to_string(r->status));
        return json::parse(r->body, nullptr, false);
    };

    get("/session", 409);
    auto r = client.Post("/orchestrate",
        json { { "action", "load" }, { "results_path", hstest::kafka_dir().string() } }.dump(), "application/json");
    if (!r || r->status != 200)
        problems.add("/orchestrate load failed");
    if (get("/session", 200).value("target_repo", "") != "linkedin/kafka")
        problems.add("/session body");

    auto prs = get("/prs?classification=MO", 200);
    std::uint64_t pr = prs.is_array() && !prs.empty() ? prs[0].value("number", 0ull) : 0;
    if (pr != 12842)
        problems.add("/prs does not list 12842");
    auto files = get("/prs/" + std::to_string(pr) + "/files", 200);
    std::size_t file = files.is_array() && !files.empty() ? files[0].value("index", 99ul) : 99;
    auto hunks = get("/prs/" + std::to_string(pr) + "/files/" + std::to_string(file) + "/hunks", 200);
    if (!hunks.is_array() || hunks.size() != 1
        || hunks[0]["header"] != json { { "old_start", 584 }, { "old_count", 9 }, { "new_start", 584 }, { "new_count", 6 } })
        problems.add("/hunks header");
    auto target = get("/prs/" + std::to_string(pr) + "/files/" + std::to_string(file) + "/target", 200);

    if (target.is_object() && target["matches"].size() == 1) {
        // Rebuild the match from the wire form and apply criterion 1's checks.
        const auto& wire = target["matches"][0];
        RegionMatch m;
        m.match_kind = wire["match_kind"] == "Shifted" ? MatchKind::Shifted : MatchKind::Exact;
        m.confidence = wire["confidence"];
        for (const auto& p : wire["pairs"])
            m.pairs.push_back({ p["source_old_line"], p["target_line"], p["similarity"],
                p["kind_of_source"] == "Removed" ? LineKind::Removed : LineKind::Context });
        if (wire["match_kind"] != "Shifted")
            problems.add("match_kind " + wire["match_kind"].dump());
        kafka_mapping_ok(m, problems);
        bool red = false;
        for (const auto& span : target["spans"])
            red |= span["color_class"] == "RemovedRed" && span["start_line"] == 545 && span["end_line"] == 547;
        if (!red)
            problems.add("no RemovedRed span 545-547");
    } else {
        problems.add("/target does not hold exactly one match");
    }
    server.stop();

    if (transport->request_count() != 0)
        problems.add(std::to_string(transport->request_count()) + " network request(s)");
    return { problems.ok(), problems.ok() ? "six endpoints over HTTP, 586->545 and 587->546, zero network requests"
                                          : problems.summary() };
}

Outcome criterion_7()
{
    Problems problems;
    hstest::TempDir dir;
    std::vector<std::string> argv { hstest::cli_path().string(), "locate", "--classifications",
        hstest::kafka_dir().string(), "--cache-dir", (dir / "cache").string(), "--fixture-dir",
        (hstest::kafka_dir() / "store").string(), "--offline" };
    auto first = hstest::run_process(argv);
    auto second = hstest::run_process(argv);
    if (first.exit_code != 0 || second.exit_code != 0)
        problems.add("exit codes " + std::to_string(first.exit_code) + ", " + std::to_string(second.exit_code));
    if (first.out != second.out)
        problems.add("reports differ");
    if (first.out.empty())
        problems.add("empty report");
    return { problems.ok(),
        problems.ok() ? "two runs, identical " + std::to_string(first.out.size()) + "-byte reports, exit 0"
                      : problems.summary() };
}

} // namespace

int main()
{
    struct Criterion {
        int number;
        std::function<Outcome()> run;
        double limit_seconds;
    };
    const Criterion criteria[] = {
        { 1, criterion_1, 1.0 },
        { 2, criterion_2, 10.0 },
        { 3, criterion_3, 30.0 },
        { 4, criterion_4, 0.0 },
        { 5, criterion_5, 0.0 },
        { 6, criterion_6, 0.0 },
        { 7, criterion_7, 0.0 },
    };

    int failed = 0;
    for (const auto& c : criteria) {
        Outcome outcome;
        auto started = std::chrono::steady_clock::now();
        try {
            outcome = c.run();
        } catch (const std::exception& e) {
            outcome = { false, std::string("exception: ") + e.what() };
        }
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        if (c.limit_seconds > 0 && seconds >= c.limit_seconds) {
            outcome.pass = false;
            outcome.detail += " (over the " + std::to_string(c.limit_seconds).substr(0, 4) + " s limit)";
        }
        failed += !outcome.pass;
        std::printf("%s criterion %d: %s [%.3f s]\n", outcome.pass ? "PASS" : "FAIL", c.number, outcome.detail.c_str(),
            seconds);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
