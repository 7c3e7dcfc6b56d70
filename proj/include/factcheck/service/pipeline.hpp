#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "factcheck/error.hpp"
#include "factcheck/retrieval/article.hpp"
#include "factcheck/retrieval/search.hpp"
#include "factcheck/sadhan/model.hpp"
#include "factcheck/service/config.hpp"
#include "factcheck/service/feedback.hpp"
#include "factcheck/worthiness/model.hpp"

namespace factcheck::service {

// A failure with the HTTP status it should surface as.
class ServiceError : public Error {
 public:
  ServiceError(int status, std::string code, const std::string& message)
      : Error(message), status_(status), code_(std::move(code)) {}
  int status() const { return status_; }
  const std::string& code() const { return code_; }

 private:
  int status_;
  std::string code_;
};

inline constexpr double kVerdictThreshold = 0.5;
inline constexpr double kDefaultClaimThreshold = 0.5;
inline constexpr std::size_t kDefaultTopK = 5;
inline constexpr std::string_view kServiceVersion = "1.0.0";

enum class Verdict { kTrue, kFalse, kUnverifiable };
std::string_view to_string(Verdict v);

struct AnalyzeClaimRequest {
  std::string claim_text;
  std::optional<std::string> page_url;
  std::map<sadhan::AspectKind, std::string> aspects;
};

struct EvidenceSource {
  std::string url;
  std::string title;
  std::string domain;
  std::optional<std::string> publication_date;
  std::vector<std::string> authors;
  std::vector<retrieval::Snippet> snippets;
  std::vector<sadhan::EvidenceSentence> sentences;  // snippet sentences with highlights
  Vector sentence_weights;                          // sentence attention, parallel to `sentences`
  Vector probabilities;                             // this source's (P(true), P(false))
};

struct RetrievalStats {
  std::size_t results = 0;    // search hits
  std::size_t extracted = 0;  // pages that yielded an article
  std::size_t failed = 0;     // pages skipped on fetch or extraction failure
  std::size_t snippets = 0;
};

struct AnalyzeResponse {
  std::string request_id;
  std::string claim;
  Verdict verdict = Verdict::kUnverifiable;
  std::optional<double> score;          // present iff verdict != unverifiable
  std::optional<Vector> probabilities;  // (P(true), P(false))
  std::map<sadhan::AspectKind, Vector> aspect_probabilities;
  std::vector<EvidenceSource> evidence;
  RetrievalStats retrieval;
  std::map<std::string, std::string> model;  // checkpoint ids, backend, version
};

struct AnalyzeArticleRequest {
  std::optional<std::string> article_url;
  std::optional<std::string> article_text;
  double claim_threshold = kDefaultClaimThreshold;
  std::size_t top_k = kDefaultTopK;
  std::map<sadhan::AspectKind, std::string> aspects;
};

struct RankedClaim {
  std::string sentence;
  std::size_t index = 0;
  double score = 0.0;
  bool selected = false;  // the claim that was fact-checked
};

struct AnalyzeArticleResponse {
  std::string request_id;
  std::optional<std::string> title;
  std::vector<RankedClaim> claims;
  std::optional<AnalyzeResponse> analysis;
};

struct AssetStatus {
  std::string name;  // "sadhan", "worthiness", "embeddings", "search"
  bool loaded = false;
  std::string detail;  // fingerprint or source when loaded, reason otherwise
};

struct HealthReport {
  std::string status;  // "ok" or "degraded"
  std::vector<AssetStatus> assets;
  std::vector<std::string> missing;
  std::string backend;  // "fixture", "live" or "none"
  std::string version;
};

struct ServiceComponents {
  std::shared_ptr<const sadhan::SadhanModel> sadhan;
  std::shared_ptr<const worthiness::WorthinessModel> worthiness;
  std::shared_ptr<const text::EmbeddingTable> retrieval_embeddings;
  std::shared_ptr<const retrieval::SearchBackend> search;
  std::filesystem::path feedback_log;
  std::vector<AssetStatus> assets;  // as reported by health()
};

// claim -> search -> extract -> filter -> classify ->
// evidence. Models and tables are shared read-only; the feedback log and the
// issued-id registry are the only mutable state.
class PipelineService {
 public:
  explicit PipelineService(ServiceComponents components);

  // Loads whatever assets the configuration names. Failures do not throw;
  // they show up as missing assets in health().
  static std::unique_ptr<PipelineService> from_config(const ServiceConfig& config);

  // Throws ServiceError: 400 malformed request, 503 model or embeddings
  // missing, 502 search backend failure.
  AnalyzeResponse analyze_claim(const AnalyzeClaimRequest& request);
  // As above; 422 when the article cannot be fetched or yields no text.
  AnalyzeArticleResponse analyze_article(const AnalyzeArticleRequest& request);
  // Fills timestamp and claim text from the issued request. Throws
  // ServiceError 404 for an unknown request id.
  FeedbackRecord submit_feedback(FeedbackRecord record);

  HealthReport health() const;

  const ServiceComponents& components() const { return components_; }

 private:
  std::string issue_request_id(const std::string& claim_text);

  ServiceComponents components_;
  std::unique_ptr<FeedbackLog> feedback_;
  mutable std::mutex ids_mutex_;
  std::unordered_map<std::string, std::string> issued_;  // request id -> claim text
};

// Opaque random 128-bit identifier, 32 lowercase hex digits.
std::string random_request_id();

nlohmann::json to_json(const AnalyzeResponse& r);
nlohmann::json to_json(const AnalyzeArticleResponse& r);
nlohmann::json to_json(const HealthReport& r);

}  // namespace factcheck::service
