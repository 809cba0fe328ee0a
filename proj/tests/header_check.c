/* The public header must compile as plain C. */
#include "reid/reid.h"

int main(void) {
  reid_settings* s = NULL;
  size_t dim = 0;
  if (reid_settings_create(&s) != REID_OK) return 1;
  if (reid_settings_feature_dim(s, &dim) != REID_OK || dim != 26960) return 1;
  reid_settings_free(s);
  return 0;
}
