#ifndef SHEAFHARM_H
#define SHEAFHARM_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#define SH_MODE_FULL 0

#define SH_MODE_EDGE_CLOSURE 1

#define SH_MODE_NODES_ONLY 2

typedef enum ShStatus {
  SH_STATUS_OK = 0,
  SH_STATUS_NULL_POINTER = 1,
  SH_STATUS_INVALID_UTF8 = 2,
  SH_STATUS_PARSE = 3,
  SH_STATUS_SCHEMA = 4,
  SH_STATUS_VALIDATION = 5,
  SH_STATUS_ANALYSIS = 6,
  SH_STATUS_INVALID_ARGUMENT = 7,
  SH_STATUS_BUFFER_TOO_SMALL = 8,
  SH_STATUS_PANIC = 9,
} ShStatus;

/**
 * Cellular sheaf on a triple's graph.
 */
typedef struct ShSheaf ShSheaf;

/**
 * Parsed and validated GAT triple.
 */
typedef struct ShTriple ShTriple;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or an empty string.
 * The pointer stays valid until the next failing call on this thread.
 */
const char *sh_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sh_version(void);

/**
 * Parses and validates a triple document of `len` bytes.
 *
 * # Safety
 * `data` must point to `len` readable bytes; `out_triple` must be writable.
 */
enum ShStatus sh_triple_parse(const uint8_t *data, size_t len, struct ShTriple **out_triple);

/**
 * Parses a NUL-terminated document.
 *
 * # Safety
 * `text` must be a valid C string; `out_triple` must be writable.
 */
enum ShStatus sh_triple_parse_cstr(const char *text, struct ShTriple **out_triple);

/**
 * # Safety
 * `triple` must be null or a handle from [`sh_triple_parse`] not yet freed.
 */
void sh_triple_free(struct ShTriple *triple);

/**
 * # Safety
 * `triple` must be a live handle and `count` writable.
 */
enum ShStatus sh_triple_node_count(const struct ShTriple *triple, size_t *count);

/**
 * # Safety
 * `triple` must be a live handle and `count` writable.
 */
enum ShStatus sh_triple_edge_count(const struct ShTriple *triple, size_t *count);

/**
 * Sheaf whose restrictions are the triple's attention weights times the identity.
 *
 * # Safety
 * `triple` must be a live handle and `out_sheaf` writable.
 */
enum ShStatus sh_sheaf_gat(const struct ShTriple *triple, struct ShSheaf **out_sheaf);

/**
 * Constant sheaf of stalk dimension `dim` on the triple's graph.
 *
 * # Safety
 * `triple` must be a live handle and `out_sheaf` writable.
 */
enum ShStatus sh_sheaf_constant(const struct ShTriple *triple,
                                size_t dim,
                                struct ShSheaf **out_sheaf);

/**
 * # Safety
 * `sheaf` must be null or a live handle.
 */
void sh_sheaf_free(struct ShSheaf *sheaf);

/**
 * Dimension of the global section space with relative rank cutoff `tol`.
 *
 * # Safety
 * `sheaf` must be a live handle and `dim` writable.
 */
enum ShStatus sh_sheaf_section_dim(const struct ShSheaf *sheaf, double tol, size_t *dim);

/**
 * Ascending Laplacian eigenvalues. `len` receives the number of values; if
 * `capacity` is too small nothing is copied and `BufferTooSmall` is returned.
 * `values` may be null when `capacity` is 0.
 *
 * # Safety
 * `values` must have room for `capacity` doubles; `len` must be writable.
 */
enum ShStatus sh_sheaf_spectrum(const struct ShSheaf *sheaf,
                                double *values,
                                size_t capacity,
                                size_t *len);

/**
 * Barcode of the residual filtration of the triple's features as JSON.
 * `sheaf` may be null to use the attention sheaf. `mode` is one of the
 * `SH_MODE_*` constants.
 *
 * # Safety
 * `triple` must be a live handle, `sheaf` null or live, `json` writable.
 */
enum ShStatus sh_barcode_json(const struct ShTriple *triple,
                              const struct ShSheaf *sheaf,
                              uint32_t mode,
                              bool include_zero_bars,
                              char **json);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void sh_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SHEAFHARM_H */
