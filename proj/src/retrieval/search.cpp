#include "factcheck/retrieval/search.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "factcheck/error.hpp"
#include "factcheck/retrieval/extract.hpp"
#include "factcheck/text/sentence.hpp"

namespace factcheck::retrieval {
namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 48> kStopwords = {
    "a",    "an",   "and",  "are",  "as",    "at",   "be",    "been", "but",  "by",    "can",  "did",
    "do",   "does", "for",  "from", "had",   "has",  "have",  "he",   "her",  "his",   "i",    "in",
    "is",   "it",   "its",  "not",  "of",    "on",   "or",    "she",  "that", "the",   "their", "they",
    "this", "to",   "was",  "we",   "were",  "will", "with",  "you",  "than", "there", "which", "who"};

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw LoadError("cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::set<std::string> query_terms(std::string_view text) {
  std::set<std::string> terms;
  for (auto& t : text::tokenize(text))
    if (text::is_word_token(t) && !is_stopword(t)) terms.insert(std::move(t));
  return terms;
}

std::string percent_encode(std::string_view s) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(hex[c >> 4]);
      out.push_back(hex[c & 15]);
    }
  }
  return out;
}

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string target;  // /path?query
};

SplitUrl split_url(std::string_view url) {
  const std::size_t scheme = url.find("://");
  if (scheme == std::string_view::npos) throw RetrievalError("invalid URL '" + std::string(url) + "'");
  const std::size_t path = url.find_first_of("/?#", scheme + 3);
  SplitUrl out;
  out.origin = std::string(url.substr(0, path));
  out.target = path == std::string_view::npos ? "/" : std::string(url.substr(path));
  if (const auto hash = out.target.find('#'); hash != std::string::npos) out.target.resize(hash);
  if (out.target.empty() || out.target[0] == '?') out.target.insert(0, "/");
  return out;
}

// GET with timeout and retries; returns the body of a 2xx response.
std::string http_get(std::string_view url, std::chrono::milliseconds timeout, int retries) {
  const auto parts = split_url(url);
  std::string last_error;
  int last_status = 0;
  for (int attempt = 0; attempt <= retries; ++attempt) {
    httplib::Client client(parts.origin);
    if (!client.is_valid()) throw RetrievalError("unsupported URL '" + std::string(url) + "'");
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    client.set_follow_location(true);
    auto res = client.Get(parts.target, httplib::Headers{{"Accept", "application/json, text/html;q=0.9, */*;q=0.5"}});
    if (!res) {
      last_error = httplib::to_string(res.error());
      last_status = 0;
      continue;
    }
    if (res->status >= 200 && res->status < 300) return res->body;
    last_status = res->status;
    last_error = "HTTP " + std::to_string(res->status);
  }
  throw RetrievalError("GET " + std::string(url) + " failed: " + last_error, last_status);
}

}  // namespace

bool is_stopword(std::string_view token) {
  return std::find(kStopwords.begin(), kStopwords.end(), token) != kStopwords.end();
}

FixtureIndex::FixtureIndex(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw LoadError("fixture directory '" + dir.string() + "' not found");
  json manifest = json::object();
  if (const auto path = dir / "manifest.json"; std::filesystem::exists(path)) {
    try {
      manifest = json::parse(read_file(path));
    } catch (const json::exception& e) {
      throw LoadError("fixture manifest: " + std::string(e.what()));
    }
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".html") continue;
    Page page;
    page.file = entry.path().filename().string();
    page.html = read_file(entry.path());
    page.url = "fixture://" + page.file;
    if (auto it = manifest.find(page.file); it != manifest.end()) {
      page.url = it->value("url", page.url);
      page.title = it->value("title", std::string{});
    }
    page.terms = query_terms(visible_text(page.html));
    pages_.push_back(std::move(page));
  }
  std::sort(pages_.begin(), pages_.end(), [](const Page& a, const Page& b) { return a.file < b.file; });
}

std::vector<SearchResult> FixtureIndex::search(std::string_view query, std::size_t k) const {
  {
    std::lock_guard lock(mutex_);
    last_query_ = std::string(query);
  }
  const auto terms = query_terms(query);
  std::vector<std::pair<std::size_t, std::size_t>> scored;  // (overlap, page)
  for (std::size_t i = 0; i < pages_.size(); ++i) {
    std::size_t overlap = 0;
    for (const auto& t : terms) overlap += pages_[i].terms.count(t);
    if (overlap > 0) scored.emplace_back(overlap, i);
  }
  // pages_ is sorted by file name, so index order breaks ties.
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  std::vector<SearchResult> out;
  const std::size_t limit = std::min(k, kMaxSearchResults);
  for (std::size_t r = 0; r < scored.size() && r < limit; ++r) {
    const auto& page = pages_[scored[r].second];
    out.push_back({page.url, page.title, page.html, r + 1});
  }
  return out;
}

std::string FixtureIndex::fetch_page(std::string_view url) const {
  for (const auto& page : pages_)
    if (page.url == url || page.file == url || "fixture://" + page.file == url) return page.html;
  throw RetrievalError("fixture page '" + std::string(url) + "' not found", 404);
}

std::string FixtureIndex::last_query() const {
  std::lock_guard lock(mutex_);
  return last_query_;
}

LiveSearchBackend::LiveSearchBackend(std::string endpoint, std::string api_key,
                                     std::chrono::milliseconds timeout, int retries)
    : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)), timeout_(timeout), retries_(retries) {
  if (endpoint_.empty()) throw std::invalid_argument("live search needs an endpoint URL");
}

std::vector<SearchResult> LiveSearchBackend::search(std::string_view query, std::size_t k) const {
  const std::size_t limit = std::min(k, kMaxSearchResults);
  std::string url = endpoint_;
  url += url.find('?') == std::string::npos ? '?' : '&';
  url += "q=" + percent_encode(query) + "&num=" + std::to_string(limit);
  if (!api_key_.empty()) url += "&key=" + percent_encode(api_key_);

  const std::string body = http_get(url, timeout_, retries_);
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw RetrievalError(std::string("search response is not JSON: ") + e.what(), 200);
  }
  std::vector<SearchResult> out;
  auto take = [&](const json& items, const char* url_key) {
    if (!items.is_array()) return;
    for (const auto& item : items) {
      if (out.size() >= limit) break;
      if (!item.is_object() || !item.contains(url_key) || !item[url_key].is_string()) continue;
      SearchResult r;
      r.url = item[url_key].get<std::string>();
      if (r.url.empty()) continue;
      if (item.contains("title") && item["title"].is_string()) r.title = item["title"].get<std::string>();
      r.rank = out.size() + 1;
      out.push_back(std::move(r));
    }
  };
  if (doc.contains("items")) take(doc["items"], "link");
  else if (doc.contains("results")) take(doc["results"], "url");
  return out;
}

std::string LiveSearchBackend::fetch_page(std::string_view url) const { return http_get(url, timeout_, retries_); }

}  // namespace factcheck::retrieval
