#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "webqa/eval.hpp"
#include "webqa/search.hpp"

namespace webqa {

/// Knobs for the synthetic question-answering benchmark: templated facts
/// rendered into a shared corpus with paraphrases and misleading documents.
struct bench_options {
  std::size_t facts = 400;
  /// Each answerable fact gets 1..max_redundancy paraphrase documents.
  std::size_t max_redundancy = 4;
  /// Each fact gets 0..max_distractors documents naming a wrong answer.
  std::size_t max_distractors = 3;
  /// Share of facts with no supporting document at all.
  double unanswerable = 0.1;
  /// Share of questions that go to the training split.
  double train_fraction = 0.5;
  std::uint64_t seed = 7;
};

struct benchmark {
  std::vector<document> corpus;
  std::vector<qa_item> train;
  std::vector<qa_item> test;
};

/// Deterministic for a given set of options.
benchmark generate_benchmark(const bench_options &opts = {});

} // namespace webqa
