#include <stdio.h>
#include <string.h>

#include "bistellar.h"

#define CHECK(cond)                                          \
  do {                                                       \
    if (!(cond)) {                                           \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__, \
              #cond, bst_last_error());                      \
      return 1;                                              \
    }                                                        \
  } while (0)

int main(void) {
  const char *json =
      "{\"dimension\": 2, \"vertices\": [0, 1, 2, 3], \"maximal_simplexes\": "
      "[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]}";
  BstComplex *k = NULL;
  CHECK(bst_complex_from_json(json, &k) == BST_STATUS_OK);

  uint64_t f[3];
  size_t needed = 0;
  CHECK(bst_complex_f_vector(k, f, 3, &needed) == BST_STATUS_OK);
  CHECK(needed == 3 && f[0] == 4 && f[1] == 6 && f[2] == 4);

  BstComplex *b = NULL;
  CHECK(bst_barycentric(k, &b) == BST_STATUS_OK);
  int64_t chi = 0;
  CHECK(bst_complex_euler_characteristic(b, &chi) == BST_STATUS_OK);
  CHECK(chi == 2);

  CHECK(bst_apply_move(k, "{\"A\": [0, 1, 2], \"B\": [4]}") == BST_STATUS_OK);
  CHECK(bst_complex_f_vector(k, f, 3, &needed) == BST_STATUS_OK);
  CHECK(f[0] == 5 && f[2] == 6);

  CHECK(bst_complex_from_json("[", &k) == BST_STATUS_INPUT);
  CHECK(strlen(bst_last_error()) > 0);
  CHECK(bst_complex_dimension(NULL, NULL) == BST_STATUS_NULL_POINTER);

  char *digest = NULL;
  CHECK(bst_complex_digest(b, &digest) == BST_STATUS_OK);
  CHECK(strlen(digest) == 64);
  bst_string_free(digest);

  bst_complex_free(b);
  bst_complex_free(k);
  printf("ok %s\n", bst_version());
  return 0;
}
