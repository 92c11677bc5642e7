#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace webqa {

// Base for every error the library raises. Callers that only care about
// "something in the QA pipeline failed" catch this.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define WEBQA_DEFINE_ERROR(name)                                               \
  class name : public error {                                                  \
  public:                                                                      \
    using error::error;                                                        \
  }

// rewrite
WEBQA_DEFINE_ERROR(empty_question);
WEBQA_DEFINE_ERROR(wrong_rewrite_kind);

// search
WEBQA_DEFINE_ERROR(empty_corpus);
WEBQA_DEFINE_ERROR(duplicate_document);
WEBQA_DEFINE_ERROR(corpus_parse_error);
/// Transport-level failure that survived every retry attempt.
WEBQA_DEFINE_ERROR(retryable_error);
/// The backend answered but the payload could not be understood.
WEBQA_DEFINE_ERROR(provider_error);

// models
WEBQA_DEFINE_ERROR(no_training_data);
WEBQA_DEFINE_ERROR(schema_mismatch);
WEBQA_DEFINE_ERROR(missing_feature);
WEBQA_DEFINE_ERROR(length_mismatch);
WEBQA_DEFINE_ERROR(incomplete_ensemble);
WEBQA_DEFINE_ERROR(model_format_error);

// eval / config
WEBQA_DEFINE_ERROR(config_error);

#undef WEBQA_DEFINE_ERROR

class dataset_parse_error : public error {
public:
  dataset_parse_error(std::size_t line, const std::string &what)
      : error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

} // namespace webqa
