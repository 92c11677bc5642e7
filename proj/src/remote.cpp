#include "webqa/remote.hpp"

#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "webqa/error.hpp"

namespace webqa {

using json = nlohmann::json;

namespace {

class in_flight_slot {
public:
  in_flight_slot(std::mutex &mu, std::condition_variable &cv,
                 std::size_t &count, std::size_t cap)
      : mu_(mu), cv_(cv), count_(count) {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return count_ < cap; });
    ++count_;
  }
  ~in_flight_slot() {
    {
      std::lock_guard lock(mu_);
      --count_;
    }
    cv_.notify_one();
  }
  in_flight_slot(const in_flight_slot &) = delete;
  in_flight_slot &operator=(const in_flight_slot &) = delete;

private:
  std::mutex &mu_;
  std::condition_variable &cv_;
  std::size_t &count_;
};

} // namespace

remote_provider::remote_provider(remote_options opts) : opts_(std::move(opts)) {
  auto scheme = opts_.endpoint.find("://");
  if (scheme == std::string::npos)
    throw config_error("remote endpoint needs a scheme: " + opts_.endpoint);
  auto slash = opts_.endpoint.find('/', scheme + 3);
  base_ = opts_.endpoint.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : opts_.endpoint.substr(slash);
  if (opts_.attempts < 1)
    opts_.attempts = 1;
  if (opts_.max_in_flight == 0)
    opts_.max_in_flight = 1;
}

std::vector<snippet> parse_search_reply(const std::string &body,
                                        const remote_options &opts,
                                        std::size_t rewrite_index,
                                        std::size_t limit) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception &e) {
    throw provider_error(std::string("unparseable search reply: ") + e.what());
  }
  const json *results = &j;
  if (!opts.results_field.empty()) {
    if (!j.is_object() || !j.contains(opts.results_field))
      throw provider_error("search reply lacks field '" + opts.results_field + "'");
    results = &j[opts.results_field];
  }
  if (!results->is_array())
    throw provider_error("search results are not an array");
  std::vector<snippet> out;
  for (const auto &item : *results) {
    if (out.size() >= limit)
      break;
    if (!item.is_object() || !item.contains(opts.summary_field) ||
        !item[opts.summary_field].is_string())
      throw provider_error("search result without string '" +
                           opts.summary_field + "'");
    snippet s;
    s.text = item[opts.summary_field].get<std::string>();
    if (item.contains("url") && item["url"].is_string())
      s.source_doc = item["url"].get<std::string>();
    else if (item.contains("id") && item["id"].is_string())
      s.source_doc = item["id"].get<std::string>();
    s.rewrite_index = rewrite_index;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<snippet> remote_provider::execute(const rewrite &r,
                                              std::size_t rewrite_index,
                                              std::size_t limit) const {
  in_flight_slot slot(mu_, cv_, in_flight_, opts_.max_in_flight);

  httplib::Params params{{opts_.query_param, r.query_string()}};
  if (!opts_.limit_param.empty())
    params.emplace(opts_.limit_param, std::to_string(limit));
  httplib::Headers headers;
  if (!opts_.bearer_token.empty())
    headers.emplace("Authorization", "Bearer " + opts_.bearer_token);

  auto backoff = opts_.initial_backoff;
  std::string last_failure;
  for (int attempt = 0; attempt < opts_.attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Client client(base_);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(opts_.timeout);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(
        opts_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    auto res = client.Get(path_, params, headers);
    if (!res) {
      last_failure = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw provider_error("search backend replied HTTP " +
                           std::to_string(res->status));
    return parse_search_reply(res->body, opts_, rewrite_index, limit);
  }
  throw retryable_error("search failed after " + std::to_string(opts_.attempts) +
                        " attempts (" + last_failure + ")");
}

} // namespace webqa
