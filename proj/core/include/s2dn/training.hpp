// Copyright 2026 The S2DN Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef S2DN_TRAINING_HPP_
#define S2DN_TRAINING_HPP_

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "s2dn/kg_store.hpp"
#include "s2dn/model.hpp"

namespace s2dn {

struct EpochLog {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;      // mean batch loss
  double val_mrr = 0.0;   // NaN without a validation set
};

struct TrainingResult {
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;  // 0 when no validation set was given
};

struct TrainingHooks {
  std::function<void(const EpochLog&)> on_epoch;
};

// Algorithm: per epoch, shuffle the positives with DetRng(derive_seed(seed,
// epoch)); for every positive build one tail-corrupted negative (head
// corruption when the tail pool is exhausted); extract subgraphs with the
// target edge dropped for positives; accumulate the composite loss over a
// batch and apply one Adam step. Gumbel and concrete noise come from a
// single stream seeded by the config seed.
//
// With `validation` triples (in `graph`'s id space) the parameters of the
// epoch with the best validation MRR are restored at the end.
//
// Throws NumericError with epoch/batch/parameter-norm diagnostics on a
// non-finite loss.
TrainingResult train(S2DNModel& model, const KnowledgeGraph& graph,
                     std::span<const Triple> validation = {},
                     const TrainingHooks& hooks = {});

// Header `epoch,loss,val_mrr`.
void write_training_log(std::span<const EpochLog> log, std::ostream& out);

}  // namespace s2dn

#endif  // S2DN_TRAINING_HPP_
