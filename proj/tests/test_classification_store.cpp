// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <hunkscope/classification_store.hpp>
#include <hunkscope/error.hpp>

#include "support/generators.hpp"
#include "support/harness.hpp"
#include "support/oracles.hpp"

using namespace hunkscope;
using hstest::error_of;
using nlohmann::json;

namespace {

json minimal_session()
{
    return json::parse(R"({
      "source_repo": "upstream/project",
      "target_repo": "fork/project",
      "divergence_date": "2021-01-31",
      "pull_requests": [{
        "number": 7, "title": "t", "url": "u",
        "files": [{
          "path": "a.c", "file_classification": "MO",
          "source_commit": "1234567", "target_commit": "89abcdef",
          "diff": "@@ -1,2 +1,1 @@\n a\n-b\n",
          "hunk_classifications": ["MO"]
        }]
      }]
    })");
}

std::string schema_pointer(const json& doc)
{
    try {
        parse_session(doc.dump());
    } catch (const SchemaError& e) {
        return e.pointer();
    } catch (const Error& e) {
        return std::string("code:") + error_code_name(e.code());
    }
    return "ok";
}

} // namespace

TEST_CASE("classification codes")
{
    CHECK(missed_opportunity.display_name == "Missed Opportunity");
    CHECK(effort_duplication.display_name == "Effort Duplication");
    auto custom = Classification::from_code("NA");
    CHECK(custom.code == "NA");
    CHECK(custom.display_name == "NA");
    CHECK(Classification::from_code("MO") == missed_opportunity);
    CHECK_FALSE(custom == missed_opportunity);
}

TEST_CASE("identifiers and dates")
{
    CHECK(is_repo_id("apache/kafka"));
    CHECK(is_repo_id("a-b.c/d_e"));
    CHECK_FALSE(is_repo_id("apache"));
    CHECK_FALSE(is_repo_id("a/b/c"));
    CHECK_FALSE(is_repo_id("/kafka"));
    CHECK(is_commit_id("fdb9fd0"));
    CHECK_FALSE(is_commit_id("fdb9fd"));
    CHECK_FALSE(is_commit_id("fdb9fdz"));
    CHECK(format_iso_date(parse_iso_date("2022-06-02")) == "2022-06-02");
    CHECK(error_of([] { parse_iso_date("2022-02-30"); }) == ErrorCode::InvalidArgument);
    CHECK(error_of([] { parse_iso_date("2022-6-2"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("kafka session")
{
    auto session = load_session(hstest::kafka_dir());
    CHECK(session.config.source_repo == "apache/kafka");
    CHECK(session.config.target_repo == "linkedin/kafka");
    CHECK(session.config.divergence_date_text() == "2022-06-02");
    REQUIRE(session.pull_requests.size() == 1);
    const auto& pr = session.pull_requests[0];
    CHECK(pr.number == 12842);
    REQUIRE(pr.files.size() == 1);
    CHECK(pr.files[0].path == hstest::kafka_path);
    CHECK(pr.files[0].target_path == pr.files[0].path);
    CHECK(pr.files[0].target_commit == "fdb9fd0");
    CHECK(pr.files[0].file_classification == missed_opportunity);
    REQUIRE(pr.files[0].hunks.size() == 1);
    CHECK(pr.files[0].hunks[0].classification == missed_opportunity);
    CHECK(pr.files[0].hunks[0].hunk.header == HunkHeader { 584, 9, 584, 6 });
    CHECK(session.find_pr(12842) == &pr);
    CHECK(session.find_pr(1) == nullptr);

    auto direct = load_session(hstest::kafka_dir() / "session.json");
    CHECK(direct.pull_requests == session.pull_requests);
    CHECK(direct.config.results_path.filename() == "session.json");
}

TEST_CASE("schema violations point at the offending value")
{
    CHECK(schema_pointer(minimal_session()) == "ok");

    auto doc = minimal_session();
    doc.erase("source_repo");
    CHECK(schema_pointer(doc) == "/source_repo");

    doc = minimal_session();
    doc["target_repo"] = "no-slash";
    CHECK(schema_pointer(doc) == "/target_repo");

    doc = minimal_session();
    doc["divergence_date"] = "2022-02-30";
    CHECK(schema_pointer(doc) == "/divergence_date");

    doc = minimal_session();
    doc["pull_requests"][0]["number"] = -3;
    CHECK(schema_pointer(doc) == "/pull_requests/0/number");

    doc = minimal_session();
    doc["pull_requests"].push_back(doc["pull_requests"][0]);
    CHECK(schema_pointer(doc) == "/pull_requests/1/number");

    doc = minimal_session();
    doc["pull_requests"][0]["files"] = json::array();
    CHECK(schema_pointer(doc) == "/pull_requests/0/files");

    doc = minimal_session();
    doc["pull_requests"][0]["files"][0]["target_commit"] = "HEAD";
    CHECK(schema_pointer(doc) == "/pull_requests/0/files/0/target_commit");

    doc = minimal_session();
    doc["pull_requests"][0]["files"][0]["hunk_classifications"] = json::array({ "MO", "ED" });
    CHECK(schema_pointer(doc) == "/pull_requests/0/files/0/hunk_classifications");

    doc = minimal_session();
    doc["pull_requests"][0]["files"][0]["hunk_classifications"] = json::array({ "" });
    CHECK(schema_pointer(doc) == "/pull_requests/0/files/0/hunk_classifications/0");

    doc = minimal_session();
    doc["pull_requests"][0]["files"][0]["diff"] = "@@ -1,3 +1,1 @@\n a\n-b\n";
    CHECK(schema_pointer(doc) == "code:HunkValidationError");
    try {
        parse_session(doc.dump());
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("PR #7") != std::string::npos);
    }

    CHECK(schema_pointer(json::array()) == "");
    CHECK(error_of([] { parse_session("{not json"); }) == ErrorCode::SchemaError);
    CHECK(error_of([] { load_session("/nonexistent/session.json"); }) == ErrorCode::IoError);
}

TEST_CASE("file diffs may carry file headers; empty diffs have no hunks")
{
    auto doc = minimal_session();
    doc["pull_requests"][0]["files"][0]["diff"] = "--- a/a.c\n+++ b/a.c\n@@ -1,2 +1,1 @@\n a\n-b\n";
    auto session = parse_session(doc.dump());
    CHECK(session.pull_requests[0].files[0].hunks.size() == 1);

    doc["pull_requests"][0]["files"][0]["diff"] = "";
    doc["pull_requests"][0]["files"][0]["hunk_classifications"] = json::array();
    session = parse_session(doc.dump());
    CHECK(session.pull_requests[0].files[0].hunks.empty());

    doc["pull_requests"][0]["files"][0]["target_path"] = "renamed/a.c";
    CHECK(parse_session(doc.dump()).pull_requests[0].files[0].target_path == "renamed/a.c");
}

TEST_CASE("generated sessions: schema walk and filter oracle")
{
    hstest::Rng rng(50);
    for (int round = 0; round < 5; ++round) {
        auto doc = hstest::random_session(rng, 50);
        auto session = parse_session(doc.dump());

        // Walk the raw document and compare every field the parser keeps.
        CHECK(session.config.source_repo == doc["source_repo"]);
        CHECK(session.config.target_repo == doc["target_repo"]);
        CHECK(session.config.divergence_date_text() == doc["divergence_date"]);
        REQUIRE(session.pull_requests.size() == doc["pull_requests"].size());
        for (std::size_t p = 0; p < session.pull_requests.size(); ++p) {
            const auto& pr = session.pull_requests[p];
            const auto& raw = doc["pull_requests"][p];
            CHECK(pr.number == raw["number"].get<std::uint64_t>());
            CHECK(pr.title == raw["title"]);
            CHECK(pr.url == raw["url"]);
            REQUIRE(pr.files.size() == raw["files"].size());
            for (std::size_t f = 0; f < pr.files.size(); ++f) {
                const auto& file = pr.files[f];
                const auto& rf = raw["files"][f];
                CHECK(file.path == rf["path"]);
                CHECK(file.file_classification.code == rf["file_classification"]);
                CHECK(file.source_commit == rf["source_commit"]);
                CHECK(file.target_commit == rf["target_commit"]);
                REQUIRE(file.hunks.size() == rf["hunk_classifications"].size());
                std::string reserialized;
                for (std::size_t h = 0; h < file.hunks.size(); ++h) {
                    CHECK(file.hunks[h].classification.code == rf["hunk_classifications"][h]);
                    reserialized += serialize(file.hunks[h].hunk);
                }
                CHECK(reserialized == rf["diff"]);
            }
        }

        for (const char* code : { "MO", "ED", "XX", "none" }) {
            std::vector<hstest::FilteredPr> got;
            for (const auto& pr : filter_by_classification(session.pull_requests, Classification::from_code(code))) {
                hstest::FilteredPr entry { pr.number, {} };
                for (const auto& file : pr.files)
                    entry.paths.push_back(file.path);
                got.push_back(std::move(entry));
            }
            CHECK(got == hstest::filter_oracle(doc, code));
        }
    }
}
