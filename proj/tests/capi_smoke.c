/*
 * Copyright 2026 The Taxrank Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* Builds with a plain C compiler against the public header only. */

#include <stdio.h>
#include <stdlib.h>

#include "taxrank/taxrank.h"

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: %s (%s)\n", __FILE__, __LINE__,     \
              #cond, taxrank_last_error());                       \
      return 1;                                                   \
    }                                                             \
  } while (0)

int main(void) {
  const double w[6] = {0.9, 0.2, 0.4, 0.1, 0.8, 0.5};
  taxrank_scores* scores = NULL;
  taxrank_result* result = NULL;
  taxrank_config config;
  taxrank_metrics m;
  size_t list[2];
  double gini = 0.0;

  taxrank_config_init(&config);
  config.k = 2;
  config.tax_rate = 1.0;

  EXPECT(taxrank_scores_create(w, 2, 3, NULL, NULL, &scores) == TAXRANK_OK);
  EXPECT(taxrank_rank(scores, &config, 1, &result) == TAXRANK_OK);
  EXPECT(taxrank_result_list(result, 0, list, 2) == TAXRANK_OK);
  EXPECT(list[0] != list[1] && list[0] < 3 && list[1] < 3);
  EXPECT(taxrank_result_metrics(result, 0, &m) == TAXRANK_OK);
  EXPECT(m.gini >= 0.0 && m.gini <= 1.0);
  EXPECT(taxrank_gini(w, NULL, 3, &gini) == TAXRANK_OK);

  config.k = 4;
  taxrank_result_free(result);
  result = NULL;
  EXPECT(taxrank_rank(scores, &config, 1, &result) == TAXRANK_ERR_INVALID_ARGUMENT);
  EXPECT(result == NULL);

  taxrank_scores_free(scores);
  printf("c api smoke ok\n");
  return 0;
}
