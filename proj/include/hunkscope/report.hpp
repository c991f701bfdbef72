// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <hunkscope/classification_store.hpp>
#include <hunkscope/locator.hpp>
#include <hunkscope/snapshot_fetcher.hpp>

#include <string>
#include <vector>

namespace hunkscope {

struct ReportRecord {
    std::uint64_t pr = 0;
    std::string file;
    std::size_t file_index = 0;
    std::size_t hunk_index = 0;
    RegionMatch match;
};

struct LocateReport {
    // Ordered by (pr, file_index, hunk_index).
    std::vector<ReportRecord> records;
    // One diagnostic per file whose target snapshot could not be fetched.
    std::vector<std::string> failures;
};

struct LocateOptions {
    FetchPolicy policy = FetchPolicy::PreferCache;
    AlignParams params;
    Classification hunk_filter = missed_opportunity;
    unsigned threads = 0; // 0: hardware concurrency
};

// Localizes every hunk carrying `hunk_filter` against its file's target
// snapshot. Fetch failures land in `failures`; NotFound is a normal record.
LocateReport run_locate(const Session& session, SnapshotFetcher& fetcher, const LocateOptions& options);

// Byte-stable JSON: sorted keys, two-space indent, trailing newline.
std::string report_json(const LocateReport& report);
std::string report_text(const LocateReport& report);

} // namespace hunkscope
