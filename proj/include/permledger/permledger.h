#ifndef PERMLEDGER_H
#define PERMLEDGER_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(PERMLEDGER_BUILDING)
#define PL_API __attribute__((visibility("default")))
#else
#define PL_API
#endif

typedef enum pl_status {
  PL_OK = 0,
  PL_E_INVALID_PARAMS,
  PL_E_DECODE,
  PL_E_VALIDATION,
  PL_E_NOT_PERMITTED_MINER,
  PL_E_BLOCK_TOO_LARGE,
  PL_E_INVALID_TRANSACTION,
  PL_E_NOT_AUTHORIZED,
  PL_E_LAST_ADMIN,
  PL_E_DENIED,
  PL_E_DUPLICATE_NAME,
  PL_E_NO_SUCH_STREAM,
  PL_E_NOT_STREAM_WRITER,
  PL_E_ITEM_TOO_LARGE,
  PL_E_NOT_SUBSCRIBED,
  PL_E_NOT_FOUND,
  PL_E_UNKNOWN_RECIPIENT_KEY,
  PL_E_ACCESS_DENIED,
  PL_E_CORRUPT_ENVELOPE,
  PL_E_CONSENT_DENIED,
  PL_E_INVALID_TRANSITION,
  PL_E_BAD_SIGNATURE,
  PL_E_STALE_EVENT,
  PL_E_PROFILE_VALIDATION,
  PL_E_UNKNOWN_FIELD,
  PL_E_CONFIG,
  PL_E_EMPTY_SAMPLES,
  PL_E_IO,
  PL_E_USAGE,
  PL_E_INTERNAL = 99
} pl_status;

/* A chain directory opened for one command sequence. */
typedef struct pl_workspace pl_workspace;

PL_API const char* pl_version(void);
/* Message of the last failed call on this thread; never NULL. */
PL_API const char* pl_last_error(void);
PL_API const char* pl_status_name(pl_status status);
/* Frees strings returned through `char** out` parameters. */
PL_API void pl_string_free(char* s);

PL_API pl_status pl_workspace_create(const char* dir, const char* params_text, const char* founder,
                                     const char* seed, pl_workspace** out);
PL_API pl_status pl_workspace_open(const char* dir, pl_workspace** out);
/* Persists the workspace to its directory. */
PL_API pl_status pl_workspace_save(pl_workspace* ws);
PL_API void pl_workspace_close(pl_workspace* ws);

/* Every call below writes a JSON document to *out on success. An empty or
   NULL node name selects the founder. */
PL_API pl_status pl_summary(pl_workspace* ws, char** out);
PL_API pl_status pl_identity_create(pl_workspace* ws, const char* name, const char* seed, char** out);
PL_API pl_status pl_identity_list(pl_workspace* ws, char** out);
PL_API pl_status pl_grant(pl_workspace* ws, const char* node, const char* target, const char* flags, char** out);
PL_API pl_status pl_revoke(pl_workspace* ws, const char* node, const char* target, const char* flags, char** out);
PL_API pl_status pl_create_stream(pl_workspace* ws, const char* node, const char* name, int open, char** out);
PL_API pl_status pl_publish(pl_workspace* ws, const char* node, const char* stream, const char* key,
                            const unsigned char* data, size_t len, char** out);
PL_API pl_status pl_subscribe(pl_workspace* ws, const char* node, const char* stream, char** out);
PL_API pl_status pl_list_streams(pl_workspace* ws, const char* node, char** out);
/* `key` and `publisher` may be NULL. */
PL_API pl_status pl_get_items(pl_workspace* ws, const char* node, const char* stream, const char* key,
                              const char* publisher, char** out);
PL_API pl_status pl_announce_key(pl_workspace* ws, const char* node, char** out);
/* `recipients` is a comma-separated list of identity names or addresses. */
PL_API pl_status pl_share(pl_workspace* ws, const char* node, const char* user, const char* recipients,
                          char** out);
PL_API pl_status pl_import(pl_workspace* ws, const char* node, const char* item_id, char** out);
PL_API pl_status pl_ingest(pl_workspace* ws, const char* node, const char* document, char** out);
/* `action` is "grant", "alter" or "withdraw"; `grantee` a name, address or "*". */
PL_API pl_status pl_consent(pl_workspace* ws, const char* node, const char* action, const char* user,
                            const char* grantee, const char* fields, char** out);
PL_API pl_status pl_stop(pl_workspace* ws, const char* node, char** out);

/* Replays a snapshot file from genesis; fails with PL_E_VALIDATION. */
PL_API pl_status pl_validate_snapshot(const char* path, char** out);

/* Runs a scenario config (key = value text) and writes the report files
   into out_dir. *out holds the latency and memory reports. */
PL_API pl_status pl_bench_run(const char* config_text, const char* out_dir, char** out);
/* min, max, avg and population sd of the samples. */
PL_API pl_status pl_stats(const double* samples, size_t n, char** out);

#ifdef __cplusplus
}
#endif

#endif
