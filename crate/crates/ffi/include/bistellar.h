#ifndef BISTELLAR_H
#define BISTELLAR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. The first four match the command line exit codes.
typedef enum BstStatus {
  BST_STATUS_OK = 0,
  // An invariant or verification check failed.
  BST_STATUS_INVARIANT = 1,
  // Malformed or inconsistent input.
  BST_STATUS_INPUT = 2,
  BST_STATUS_RESOURCE_CAP = 3,
  BST_STATUS_NULL_POINTER = 4,
  // A Rust panic was caught at the boundary.
  BST_STATUS_PANIC = 5,
} BstStatus;

// Opaque handle to a simplicial complex.
typedef struct BstComplex BstComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or an empty string. The
// pointer stays valid until the next failing call on the same thread.
const char *bst_last_error(void);

// # Safety
// `s` must be null or a string returned by this library and not yet freed.
void bst_string_free(char *s);

// Parses a complex from the JSON complex format.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum BstStatus bst_complex_from_json(const char *json, struct BstComplex **out_handle);

// # Safety
// `k` must be null or a handle from this library that has not been freed.
void bst_complex_free(struct BstComplex *k);

// # Safety
// `k` must be a live handle; `out` must be writable.
enum BstStatus bst_complex_to_json(const struct BstComplex *k, char **out_json);

// Hex SHA-256 of the canonical serialization.
//
// # Safety
// `k` must be a live handle; `out` must be writable.
enum BstStatus bst_complex_digest(const struct BstComplex *k, char **out_hex);

// Dimension, or −1 for the empty complex.
//
// # Safety
// `k` must be a live handle; `out` must be writable.
enum BstStatus bst_complex_dimension(const struct BstComplex *k, int32_t *out_dim);

// Writes up to `len` entries of the f-vector to `buf` and the full length
// to `needed`.
//
// # Safety
// `k` must be a live handle; `buf` must hold `len` values (or be null when
// `len` is 0); `needed` must be writable.
enum BstStatus bst_complex_f_vector(const struct BstComplex *k,
                                    uint64_t *buf,
                                    size_t len,
                                    size_t *needed);

// # Safety
// `k` must be a live handle; `out` must be writable.
enum BstStatus bst_complex_euler_characteristic(const struct BstComplex *k, int64_t *out_chi);

// # Safety
// `k` must be a live handle; `out` must be writable.
enum BstStatus bst_complex_is_closed_pseudomanifold(const struct BstComplex *k, bool *out_flag);

// Barycentric subdivision as a new handle.
//
// # Safety
// `k` must be a live handle; `out` must be writable.
enum BstStatus bst_barycentric(const struct BstComplex *k, struct BstComplex **out_handle);

// Applies one move `{"A": [...], "B": [...]}` in place. The complex is left
// unchanged when the move is not applicable.
//
// # Safety
// `k` must be a live handle not shared with another thread; `move_json`
// must be a NUL-terminated string.
enum BstStatus bst_apply_move(struct BstComplex *k, const char *move_json);

// Replays a sequence file on `k`, checking both digests, and returns the
// end complex as a new handle.
//
// # Safety
// `k` must be a live handle; `seq_json` a NUL-terminated string; `out`
// writable.
enum BstStatus bst_replay_sequence(const struct BstComplex *k,
                                   const char *seq_json,
                                   struct BstComplex **out_handle);

// Whether the two complexes are isomorphic.
//
// # Safety
// `a` and `b` must be live handles; `out` must be writable.
enum BstStatus bst_isomorphic(const struct BstComplex *a,
                              const struct BstComplex *b,
                              bool *out_flag);

// Relates two triangulations of one flat torus, given in the geometric
// complex format. Writes the verified sequence `βK1 → βK2` as JSON and the
// start complex `βK1` as a new handle.
//
// # Safety
// `k1_json` and `k2_json` must be NUL-terminated strings; the outputs must
// be writable.
enum BstStatus bst_relate(const char *k1_json,
                          const char *k2_json,
                          char **out_sequence,
                          struct BstComplex **out_start);

// `2^n (n+1)!^{4+3m′} p q (p+q)` as a decimal string.
//
// # Safety
// `out` must be writable.
enum BstStatus bst_total_bound(uint32_t n,
                               uint64_t p,
                               uint64_t q,
                               uint64_t mprime,
                               char **out_decimal);

// Library version, a static string.
const char *bst_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BISTELLAR_H */
