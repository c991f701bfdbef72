// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <hunkscope/diff_model.hpp>
#include <hunkscope/error.hpp>

#include "support/generators.hpp"
#include "support/harness.hpp"
#include "support/oracles.hpp"

using namespace hunkscope;
using hstest::error_of;

namespace {

const char* kafka_hunk = "@@ -584,9 +584, 6 @@\n"
                         "         void flush() throws RocksDBException;\n"
                         " \n"
                         "-        void prepareBatchForRestore(final Collection<KeyValue<byte[], byte[]> > records,\n"
                         "-                                    final WriteBatch batch) throws RocksDBException;\n"
                         "-\n"
                         "         void addToBatch(final byte[] key,\n"
                         "                         final byte[] value,\n"
                         "                         final WriteBatch batch) throws RocksDBException;\n"
                         " \n";

} // namespace

TEST_CASE("hunk headers")
{
    CHECK(parse_hunk_header("@@ -584,9 +584, 6 @@") == HunkHeader { 584, 9, 584, 6 });
    CHECK(parse_hunk_header("@@ -1 +1 @@") == HunkHeader { 1, 1, 1, 1 });
    CHECK(parse_hunk_header("@@ -0,0 +1,3 @@") == HunkHeader { 0, 0, 1, 3 });
    CHECK(parse_hunk_header("@@  -7,2  +9,0  @@") == HunkHeader { 7, 2, 9, 0 });

    std::optional<std::string> heading;
    parse_hunk_header("@@ -3,4 +3,5 @@ int main(void)", &heading);
    CHECK(heading == "int main(void)");
    parse_hunk_header("@@ -3,4 +3,5 @@", &heading);
    CHECK_FALSE(heading.has_value());

    for (const char* bad : { "@@ -a,1 +1 @@", "@@ -1,1 +1,1", "@ -1 +1 @", "@@ -0,2 +1 @@", "@@ +1,1 -1,1 @@", "",
             "@@ -1,99999999999 +1 @@" }) {
        CAPTURE(bad);
        CHECK(error_of([&] { parse_hunk_header(bad); }) == ErrorCode::MalformedHeader);
    }

    CHECK(format_hunk_header({ 584, 9, 584, 6 }) == "@@ -584,9 +584,6 @@");
    CHECK(format_hunk_header({ 5, 1, 0, 0 }) == "@@ -5 +0,0 @@");
}

TEST_CASE("kafka hunk parses with the listing's counts")
{
    auto hunks = parse_hunks(kafka_hunk);
    REQUIRE(hunks.size() == 1);
    const auto& h = hunks[0];
    CHECK(h.header == HunkHeader { 584, 9, 584, 6 });
    CHECK(h.lines.size() == 9);
    CHECK(pre_image(h).size() == 9);
    CHECK(post_image(h).size() == 6);
    CHECK(h.lines[2].kind == LineKind::Removed);
    CHECK(h.lines[2].old_line == 586u);
    CHECK_FALSE(h.lines[2].new_line.has_value());
    CHECK(h.lines[5].old_line == 589u);
    CHECK(h.lines[5].new_line == 586u);
    CHECK(is_deletion_only(h));
    CHECK_FALSE(is_addition_only(h));
    CHECK(hstest::recount_problem(h).empty());
    validate(h);
}

TEST_CASE("body and header disagreements")
{
    SUBCASE("too long")
    {
        CHECK(error_of([] { parse_hunks("@@ -1,1 +1,1 @@\n a\n b\n"); }) == ErrorCode::CountMismatch);
    }
    SUBCASE("removed line beyond old count")
    {
        CHECK(error_of([] { parse_hunks("@@ -1,1 +1,2 @@\n a\n-b\n+c\n"); }) == ErrorCode::CountMismatch);
    }
    SUBCASE("truncated")
    {
        CHECK(error_of([] { parse_hunks("@@ -1,3 +1,3 @@\n a\n b\n"); }) == ErrorCode::TruncatedHunk);
    }
    SUBCASE("garbage inside body")
    {
        CHECK(error_of([] { parse_hunks("@@ -1,2 +1,2 @@\n a\n?b\n"); }) == ErrorCode::CountMismatch);
    }
    SUBCASE("overlapping hunks")
    {
        CHECK(error_of([] { parse_hunks("@@ -1,2 +1,2 @@\n a\n b\n@@ -2,1 +2,1 @@\n b\n"); })
            == ErrorCode::MalformedHeader);
    }
    SUBCASE("error carries the input line")
    {
        try {
            parse_hunks("@@ -1,1 +1,1 @@\n a\n@@ -x @@\n");
            FAIL("expected a throw");
        } catch (const DiffError& e) {
            CHECK(e.code() == ErrorCode::MalformedHeader);
            CHECK(e.line() == 3);
        }
    }
}

TEST_CASE("unified diff files")
{
    const std::string text = "some mail header\n"
                             "diff --git a/lib/x.c b/lib/x.c\n"
                             "index 83db48f..bf269f4 100644\n"
                             "--- a/lib/x.c\t2022-06-02 10:00:00\n"
                             "+++ b/lib/x.c\t2022-06-03 10:00:00\n"
                             "@@ -1,2 +1,2 @@ static int f(void)\n"
                             "-old\n"
                             "+new\n"
                             " same\n"
                             "--- /dev/null\n"
                             "+++ b/added.txt\n"
                             "@@ -0,0 +1 @@\n"
                             "+only\n"
                             "\\ No newline at end of file\n"
                             "-- \n"
                             "2.34.1\n";
    auto patches = parse_unified_diff(text);
    REQUIRE(patches.size() == 2);
    CHECK(patches[0].old_path == "lib/x.c");
    CHECK(patches[0].new_path == "lib/x.c");
    CHECK(patches[0].preamble
        == std::vector<std::string> { "diff --git a/lib/x.c b/lib/x.c", "index 83db48f..bf269f4 100644" });
    CHECK(patches[0].hunks[0].section_heading == "static int f(void)");
    CHECK(patches[1].old_path == "/dev/null");
    CHECK(patches[1].new_path == "added.txt");
    CHECK(is_addition_only(patches[1].hunks[0]));
    CHECK(patches[1].hunks[0].lines[0].eof_marker == "\\ No newline at end of file");

    auto again = parse_unified_diff(serialize(patches));
    CHECK(again == patches);
    CHECK(serialize(again) == serialize(patches));
}

TEST_CASE("end-of-file markers survive a round trip")
{
    const std::string text = "@@ -1,2 +1,2 @@\n"
                             " a\n"
                             "-b\n"
                             "\\ No newline at end of file\n"
                             "+b\n";
    auto hunks = parse_hunks(text);
    REQUIRE(hunks.size() == 1);
    CHECK(hunks[0].lines[1].eof_marker == "\\ No newline at end of file");
    CHECK(serialize(hunks[0]) == text);
}

TEST_CASE("validate rejects hand-built inconsistencies")
{
    auto h = parse_hunks(kafka_hunk).front();
    auto broken = h;
    broken.header.old_count = 8;
    CHECK(error_of([&] { validate(broken); }) == ErrorCode::CountMismatch);
    broken = h;
    broken.lines[3].old_line = 999;
    CHECK(error_of([&] { validate(broken); }) == ErrorCode::CountMismatch);
    broken = h;
    broken.lines[0].new_line.reset();
    CHECK(error_of([&] { validate(broken); }) == ErrorCode::CountMismatch);
}

TEST_CASE("generated diffs: round trip, count law, and application")
{
    hstest::Rng rng(20220602);
    int failures = 0;
    for (int n = 0; n < 1000; ++n) {
        auto diff = hstest::random_diff(rng);
        auto text = serialize(diff);
        std::vector<FilePatch> parsed;
        try {
            parsed = parse_unified_diff(text);
        } catch (const Error& e) {
            ++failures;
            MESSAGE("case " << n << ": " << e.what() << "\n" << text);
            continue;
        }
        if (parsed != diff || serialize(parsed) != text) {
            ++failures;
            MESSAGE("case " << n << " does not round-trip\n" << text);
            continue;
        }
        for (const auto& patch : parsed) {
            for (const auto& hunk : patch.hunks) {
                auto problem = hstest::recount_problem(hunk);
                if (!problem.empty()) {
                    ++failures;
                    MESSAGE("case " << n << ": " << problem);
                }
                // Applying the hunk to its own pre-image yields its post-image.
                std::vector<std::string> file;
                for (const auto& l : pre_image(hunk))
                    file.push_back(l.text);
                Hunk local = hunk;
                local.header.old_start = local.header.old_count ? 1 : 0;
                std::vector<std::string> expected;
                for (const auto& l : post_image(hunk))
                    expected.push_back(l.text);
                if (hstest::apply_hunk(file, local) != expected) {
                    ++failures;
                    MESSAGE("case " << n << ": pre/post images disagree with the body");
                }
            }
        }
    }
    CHECK(failures == 0);
}
