#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "factcheck/retrieval/article.hpp"

namespace factcheck::retrieval {

// A web search engine as seen by the pipeline. Implementations must be safe
// for concurrent calls.
class SearchBackend {
 public:
  virtual ~SearchBackend() = default;

  // At most min(k, kMaxSearchResults) results in backend rank order. The
  // query is used verbatim. Throws RetrievalError when the backend fails;
  // an empty result list is not an error.
  virtual std::vector<SearchResult> search(std::string_view query, std::size_t k) const = 0;

  // Raw page body for a URL. Throws RetrievalError.
  virtual std::string fetch_page(std::string_view url) const = 0;

  // "live" or "fixture".
  virtual std::string_view mode() const = 0;
};

// Offline index over a directory of .html files. An optional manifest.json
// maps file name to {"url": ..., "title": ...}; pages without an entry get
// the url "fixture://<file name>". Ranking counts the distinct non-stopword
// query terms that occur in a page; pages sharing no term are not returned;
// ties go to the lexicographically smaller file name.
class FixtureIndex final : public SearchBackend {
 public:
  explicit FixtureIndex(const std::filesystem::path& dir);

  std::vector<SearchResult> search(std::string_view query, std::size_t k) const override;
  std::string fetch_page(std::string_view url) const override;
  std::string_view mode() const override { return "fixture"; }

  std::size_t size() const { return pages_.size(); }
  // The last query string received, for verifying pass-through.
  std::string last_query() const;

 private:
  struct Page {
    std::string file;
    std::string url;
    std::string title;
    std::string html;
    std::set<std::string> terms;
  };

  std::vector<Page> pages_;
  mutable std::mutex mutex_;
  mutable std::string last_query_;
};

// JSON search API over HTTP(S). Sends GET <endpoint>?q=<query>&num=<k>
// [&key=<api key>] and reads (url, title) pairs from either
// {"items": [{"link", "title"}]} or {"results": [{"url", "title"}]}.
// Each request has a timeout and is retried once on failure.
class LiveSearchBackend final : public SearchBackend {
 public:
  LiveSearchBackend(std::string endpoint, std::string api_key,
                    std::chrono::milliseconds timeout = std::chrono::seconds(10), int retries = 1);

  std::vector<SearchResult> search(std::string_view query, std::size_t k) const override;
  std::string fetch_page(std::string_view url) const override;
  std::string_view mode() const override { return "live"; }

 private:
  std::string endpoint_;
  std::string api_key_;
  std::chrono::milliseconds timeout_;
  int retries_;
};

// True for the small closed-class word list ignored by fixture ranking.
bool is_stopword(std::string_view token);

}  // namespace factcheck::retrieval
