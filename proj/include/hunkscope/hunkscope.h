/* SPDX-License-Identifier: Apache-2.0 */
#ifndef HUNKSCOPE_H
#define HUNKSCOPE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define HS_API __declspec(dllexport)
#else
#define HS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct hs_session hs_session;
typedef struct hs_fetcher hs_fetcher;
typedef struct hs_server hs_server;

typedef enum hs_status {
    HS_OK = 0,
    HS_ERR_INVALID_ARGUMENT = 1,
    HS_ERR_IO = 2,
    HS_ERR_PARSE = 3, /* malformed diff */
    HS_ERR_SCHEMA = 4, /* session or config document */
    HS_ERR_NOT_FOUND = 5,
    HS_ERR_RATE_LIMITED = 6,
    HS_ERR_AUTH_REQUIRED = 7,
    HS_ERR_OFFLINE_MISS = 8,
    HS_ERR_NETWORK = 9,
    HS_ERR_EMPTY_TARGET = 10,
    HS_ERR_PROCESS = 11,
    HS_ERR_CONFIG = 12,
    HS_ERR_BIND = 13,
    HS_ERR_INTERNAL = 99
} hs_status;

typedef enum hs_fetch_policy {
    HS_POLICY_PREFER_CACHE = 0,
    HS_POLICY_REFRESH_ALWAYS = 1,
    HS_POLICY_OFFLINE_ONLY = 2
} hs_fetch_policy;

typedef enum hs_format { HS_FORMAT_JSON = 0, HS_FORMAT_TEXT = 1 } hs_format;

typedef struct hs_align_params {
    double tau_line;
    double tau_region;
    double exact_reward;
    double fuzzy_reward;
    double mismatch_penalty;
    double gap_penalty;
} hs_align_params;

/* Message for the last failing call on this thread; never NULL. */
HS_API const char* hs_last_error_message(void);

/* Frees strings returned through char** out-parameters. */
HS_API void hs_string_free(char* text);

HS_API const char* hs_version(void);

HS_API hs_align_params hs_align_params_default(void);

HS_API hs_status hs_session_load(const char* results_path, hs_session** out);
HS_API void hs_session_free(hs_session* session);
HS_API size_t hs_session_pr_count(const hs_session* session);
/* {"source_repo","target_repo","divergence_date"} */
HS_API hs_status hs_session_config_json(const hs_session* session, char** out);

/* fixture_dir and token_env may be NULL. */
HS_API hs_status hs_fetcher_create(const char* cache_dir, const char* fixture_dir, const char* token_env,
    hs_fetcher** out);
HS_API void hs_fetcher_free(hs_fetcher* fetcher);
HS_API hs_status hs_fetcher_cache_stats(const hs_fetcher* fetcher, uint64_t* entries, uint64_t* bytes);

/* Localizes every hunk tagged `classification` (NULL means "MO") and renders
 * the report. `failures` (may be NULL) receives the count of files whose
 * target could not be fetched. */
HS_API hs_status hs_locate_report(const hs_session* session, hs_fetcher* fetcher, hs_fetch_policy policy,
    const hs_align_params* params, const char* classification, hs_format format, char** out, int* failures);

/* One-shot localization of every hunk in `diff` (a unified diff or bare
 * hunks) against `target` text. Returns a JSON array of match lists. */
HS_API hs_status hs_locate_text(const char* diff, const char* target, const hs_align_params* params, char** out);

HS_API hs_status hs_server_create(const char* config_path, hs_server** out);
/* port < 0 uses the configured port; 0 picks an ephemeral one. */
HS_API hs_status hs_server_start(hs_server* server, int port, int* bound_port);
HS_API void hs_server_stop(hs_server* server);
HS_API void hs_server_free(hs_server* server);

#ifdef __cplusplus
}
#endif

#endif
