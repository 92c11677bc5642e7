#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <mutex>
#include <string>

#include "webqa/search.hpp"

namespace webqa {

struct remote_options {
  /// e.g. "http://127.0.0.1:8080/search"
  std::string endpoint;
  std::string query_param = "q";
  /// Empty to omit the result-count parameter.
  std::string limit_param = "count";
  /// Field holding the result array; empty when the body is the array.
  std::string results_field = "results";
  std::string summary_field = "summary";
  std::string bearer_token;
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{250};
  std::chrono::milliseconds timeout{10000};
  std::size_t max_in_flight = 4;
};

/// Search provider backed by an HTTP search API. Each execute() issues one
/// GET (plus retries on transport errors and 5xx replies, with exponential
/// backoff). At most max_in_flight requests run at once across threads.
class remote_provider final : public search_provider {
public:
  explicit remote_provider(remote_options opts);

  /// Throws retryable_error after the last failed attempt and
  /// provider_error for replies that cannot be parsed.
  std::vector<snippet> execute(const rewrite &r, std::size_t rewrite_index,
                               std::size_t limit) const override;

  const remote_options &options() const { return opts_; }

private:
  remote_options opts_;
  std::string base_; // scheme://host[:port]
  std::string path_;

  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  mutable std::size_t in_flight_ = 0;
};

/// Parses a search API reply body into snippets. Exposed for testing.
std::vector<snippet> parse_search_reply(const std::string &body,
                                        const remote_options &opts,
                                        std::size_t rewrite_index,
                                        std::size_t limit);

} // namespace webqa
