#include "factcheck/service/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <future>
#include <random>
#include <sstream>

#include "factcheck/io/checkpoint.hpp"
#include "factcheck/retrieval/extract.hpp"
#include "factcheck/retrieval/snippets.hpp"
#include "factcheck/text/sentence.hpp"

namespace factcheck::service {
namespace {

using nlohmann::json;

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

json probability_json(const Vector& p) { return {{"true", p(0)}, {"false", p(1)}}; }

// The dimension is whatever the first non-blank line carries.
std::shared_ptr<const text::EmbeddingTable> load_vectors_file(const std::filesystem::path& path) {
  std::ifstream probe(path);
  if (!probe) throw LoadError("cannot read '" + path.string() + "'");
  std::string line;
  std::size_t fields = 0;
  while (fields == 0 && std::getline(probe, line)) {
    std::istringstream ss(line);
    std::string f;
    while (ss >> f) ++fields;
  }
  if (fields < 2) throw LoadError("'" + path.string() + "' holds no word vectors");
  std::ifstream in(path);
  return std::make_shared<const text::EmbeddingTable>(text::load_word_vectors(in, fields - 1));
}

AssetStatus missing(std::string name, std::string why) { return {std::move(name), false, std::move(why)}; }

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kTrue: return "true";
    case Verdict::kFalse: return "false";
    case Verdict::kUnverifiable: break;
  }
  return "unverifiable";
}

std::string random_request_id() {
  thread_local std::mt19937_64 gen{[] {
    std::random_device rd;
    std::seed_seq seq{rd(), rd(), rd(), rd(), rd(), rd(), rd(), rd()};
    return std::mt19937_64(seq);
  }()};
  static constexpr char hex[] = "0123456789abcdef";
  std::string id;
  for (int half = 0; half < 2; ++half) {
    std::uint64_t x = gen();
    for (int i = 0; i < 16; ++i, x >>= 4) id.push_back(hex[x & 15]);
  }
  return id;
}

PipelineService::PipelineService(ServiceComponents components) : components_(std::move(components)) {
  feedback_ = std::make_unique<FeedbackLog>(components_.feedback_log);
}

std::unique_ptr<PipelineService> PipelineService::from_config(const ServiceConfig& config) {
  ServiceComponents c;
  c.feedback_log = config.feedback_log;

  if (!config.sadhan_ckpt) {
    c.assets.push_back(missing("sadhan", "SADHAN_CKPT not set"));
  } else {
    try {
      c.sadhan = std::make_shared<const sadhan::SadhanModel>(sadhan::SadhanModel::load(*config.sadhan_ckpt));
      c.assets.push_back({"sadhan", true, io::file_fingerprint(*config.sadhan_ckpt)});
    } catch (const std::exception& e) {
      c.assets.push_back(missing("sadhan", e.what()));
    }
  }

  if (!config.worthiness_ckpt) {
    c.assets.push_back(missing("worthiness", "WORTHINESS_CKPT not set"));
  } else {
    try {
      c.worthiness = std::make_shared<const worthiness::WorthinessModel>(
          worthiness::WorthinessModel::load(*config.worthiness_ckpt));
      c.assets.push_back({"worthiness", true, io::file_fingerprint(*config.worthiness_ckpt)});
    } catch (const std::exception& e) {
      c.assets.push_back(missing("worthiness", e.what()));
    }
  }

  if (config.embeddings_path) {
    try {
      c.retrieval_embeddings = load_vectors_file(*config.embeddings_path);
      c.assets.push_back({"embeddings", true, io::file_fingerprint(*config.embeddings_path)});
    } catch (const std::exception& e) {
      c.assets.push_back(missing("embeddings", e.what()));
    }
  } else if (c.sadhan) {
    c.retrieval_embeddings = c.sadhan->embeddings_ptr();
    c.assets.push_back({"embeddings", true, "sadhan checkpoint table"});
  } else {
    c.assets.push_back(missing("embeddings", "EMBEDDINGS_PATH not set and no SADHAN checkpoint"));
  }

  try {
    if (config.search_backend == "live") {
      if (config.search_endpoint.empty()) throw std::invalid_argument("SEARCH_ENDPOINT not set");
      c.search = std::make_shared<const retrieval::LiveSearchBackend>(config.search_endpoint, config.search_api_key);
      c.assets.push_back({"search", true, "live"});
    } else {
      if (!config.fixture_dir) throw std::invalid_argument("FIXTURE_DIR not set");
      auto index = std::make_shared<const retrieval::FixtureIndex>(*config.fixture_dir);
      c.assets.push_back({"search", true, "fixture: " + std::to_string(index->size()) + " pages"});
      c.search = std::move(index);
    }
  } catch (const std::exception& e) {
    c.assets.push_back(missing("search", e.what()));
  }

  return std::make_unique<PipelineService>(std::move(c));
}

std::string PipelineService::issue_request_id(const std::string& claim_text) {
  std::lock_guard lock(ids_mutex_);
  std::string id;
  do id = random_request_id();
  while (issued_.count(id));
  issued_.emplace(id, claim_text);
  return id;
}

AnalyzeResponse PipelineService::analyze_claim(const AnalyzeClaimRequest& request) {
  if (blank(request.claim_text)) throw ServiceError(400, "invalid_request", "claim_text must not be empty");
  auto aspects = request.aspects;
  if (!aspects.count(sadhan::AspectKind::kDomain) && request.page_url) {
    if (auto domain = retrieval::registrable_domain(*request.page_url); !domain.empty())
      aspects[sadhan::AspectKind::kDomain] = std::move(domain);
  }
  const auto claim = sadhan::Claim::from_text(request.claim_text, std::move(aspects));
  if (claim.tokens.empty()) throw ServiceError(400, "invalid_request", "claim_text has no tokens");
  if (!components_.sadhan) throw ServiceError(503, "model_unavailable", "SADHAN model is not loaded");
  if (!components_.retrieval_embeddings)
    throw ServiceError(503, "model_unavailable", "retrieval embeddings are not loaded");
  if (!components_.search) throw ServiceError(503, "backend_unavailable", "search backend is not configured");
  const auto& backend = *components_.search;

  AnalyzeResponse out;
  out.claim = request.claim_text;

  std::vector<retrieval::SearchResult> results;
  try {
    results = backend.search(request.claim_text, retrieval::kMaxSearchResults);
  } catch (const RetrievalError& e) {
    throw ServiceError(502, "search_failed", e.what());
  }
  out.retrieval.results = results.size();

  // Pages the backend did not inline are fetched concurrently; one task per
  // result, so at most kMaxSearchResults in flight.
  std::vector<std::future<std::optional<retrieval::Article>>> pending;
  for (const auto& r : results) {
    pending.push_back(std::async(std::launch::async, [&backend, r]() -> std::optional<retrieval::Article> {
      retrieval::SearchResult page = r;
      try {
        if (page.raw_html.empty()) page.raw_html = backend.fetch_page(page.url);
        return retrieval::extract_article(page);
      } catch (const Error&) {
        return std::nullopt;
      }
    }));
  }
  std::vector<retrieval::Article> articles;
  for (auto& f : pending) {
    if (auto a = f.get()) articles.push_back(std::move(*a));
    else ++out.retrieval.failed;
  }
  out.retrieval.extracted = articles.size();

  std::vector<EvidenceSource> sources;
  std::vector<std::vector<std::string>> source_texts;
  std::vector<sadhan::Document> documents;
  for (const auto& article : articles) {
    auto snippets = retrieval::filter_snippets(claim.tokens, article, *components_.retrieval_embeddings);
    if (snippets.empty()) continue;
    out.retrieval.snippets += snippets.size();
    std::vector<std::string> texts;
    for (const auto& s : snippets)
      for (std::size_t i = s.start; i <= s.end; ++i) texts.push_back(article.sentences[i].text);
    EvidenceSource src;
    src.url = article.url;
    src.title = article.title;
    src.domain = article.domain;
    src.publication_date = article.publication_date;
    src.authors = article.authors;
    src.snippets = std::move(snippets);
    documents.push_back(sadhan::make_document(texts));
    source_texts.push_back(std::move(texts));
    sources.push_back(std::move(src));
  }

  std::optional<sadhan::CredibilityResult> result;
  if (!documents.empty()) {
    try {
      result = sadhan::predict(*components_.sadhan, claim, documents);
    } catch (const ModelError& e) {
      throw ServiceError(500, "model_error", e.what());
    }
  }
  if (result) {
    out.score = std::clamp(result->score, 0.0, 1.0);
    out.verdict = *out.score >= kVerdictThreshold ? Verdict::kTrue : Verdict::kFalse;
    out.probabilities = result->probabilities;
    out.aspect_probabilities = result->aspect_probabilities;
    for (const auto& doc : result->documents) {
      auto& src = sources[doc.index];
      src.probabilities = doc.probabilities;
      src.sentence_weights = doc.attention.sentence_weights;
      src.sentences = sadhan::extract_evidence(doc.attention, source_texts[doc.index], documents[doc.index]);
      out.evidence.push_back(std::move(src));
    }
  }

  for (const auto& a : components_.assets)
    if (a.loaded && (a.name == "sadhan" || a.name == "worthiness")) out.model[a.name] = a.detail;
  out.model["backend"] = std::string(backend.mode());
  out.model["version"] = std::string(kServiceVersion);
  out.request_id = issue_request_id(out.claim);
  return out;
}

AnalyzeArticleResponse PipelineService::analyze_article(const AnalyzeArticleRequest& request) {
  if (request.article_url.has_value() == request.article_text.has_value())
    throw ServiceError(400, "invalid_request", "exactly one of article_url and article_text is required");
  if (request.article_url && blank(*request.article_url))
    throw ServiceError(400, "invalid_request", "article_url must not be empty");
  if (request.article_text && blank(*request.article_text))
    throw ServiceError(400, "invalid_request", "article_text must not be empty");
  if (!(request.claim_threshold >= 0.0 && request.claim_threshold <= 1.0))
    throw ServiceError(400, "invalid_request", "claim_threshold must lie in [0, 1]");
  if (request.top_k == 0) throw ServiceError(400, "invalid_request", "top_k must be positive");
  if (!components_.worthiness) throw ServiceError(503, "model_unavailable", "claim-worthiness model is not loaded");
  if (!components_.sadhan) throw ServiceError(503, "model_unavailable", "SADHAN model is not loaded");

  retrieval::SearchResult page;
  if (request.article_url) {
    if (!components_.search) throw ServiceError(503, "backend_unavailable", "search backend is not configured");
    page.url = *request.article_url;
    try {
      page.raw_html = components_.search->fetch_page(page.url);
    } catch (const RetrievalError& e) {
      throw ServiceError(422, "article_unavailable", e.what());
    }
  } else {
    page.raw_html = *request.article_text;
  }
  retrieval::Article article;
  try {
    article = retrieval::extract_article(page);
  } catch (const ExtractionError& e) {
    throw ServiceError(422, "article_unreadable", e.what());
  }

  AnalyzeArticleResponse out;
  if (!article.title.empty()) out.title = article.title;
  const auto ranked =
      worthiness::rank_claims(*components_.worthiness, article, request.claim_threshold, request.top_k);
  for (const auto& s : ranked) out.claims.push_back({s.sentence.text, s.sentence.index, s.score, false});
  if (!out.claims.empty()) {
    AnalyzeClaimRequest top{out.claims.front().sentence, request.article_url, request.aspects};
    out.analysis = analyze_claim(top);
    out.claims.front().selected = true;
  }
  out.request_id = issue_request_id(out.claims.empty() ? std::string{} : out.claims.front().sentence);
  return out;
}

FeedbackRecord PipelineService::submit_feedback(FeedbackRecord record) {
  {
    std::lock_guard lock(ids_mutex_);
    auto it = issued_.find(record.request_id);
    if (it == issued_.end()) throw ServiceError(404, "unknown_request", "unknown request id '" + record.request_id + "'");
    record.claim_text = it->second;
  }
  record.timestamp = utc_timestamp();
  feedback_->append(record);
  return record;
}

HealthReport PipelineService::health() const {
  HealthReport h;
  h.assets = components_.assets;
  for (const auto& a : h.assets)
    if (!a.loaded) h.missing.push_back(a.name);
  h.status = h.missing.empty() ? "ok" : "degraded";
  h.backend = components_.search ? std::string(components_.search->mode()) : "none";
  h.version = std::string(kServiceVersion);
  return h;
}

json to_json(const AnalyzeResponse& r) {
  json j;
  j["request_id"] = r.request_id;
  j["claim"] = r.claim;
  j["verdict"] = std::string(to_string(r.verdict));
  if (r.score) j["score"] = *r.score;
  if (r.probabilities) j["probabilities"] = probability_json(*r.probabilities);
  json aspects = json::object();
  for (const auto& [kind, p] : r.aspect_probabilities) aspects[std::string(sadhan::to_string(kind))] = probability_json(p);
  j["aspects"] = aspects;
  json evidence = json::array();
  for (const auto& src : r.evidence) {
    json e = {{"url", src.url}, {"title", src.title}, {"domain", src.domain}, {"authors", src.authors}};
    e["publication_date"] = src.publication_date ? json(*src.publication_date) : json(nullptr);
    if (src.probabilities.size() == 2) e["probabilities"] = probability_json(src.probabilities);
    json snippets = json::array();
    for (const auto& s : src.snippets)
      snippets.push_back({{"start", s.start}, {"end", s.end}, {"text", s.text}, {"similarity", s.similarity}});
    e["snippets"] = snippets;
    json sentences = json::array();
    for (const auto& s : src.sentences) {
      json words = json::array();
      for (const auto& [token, weight] : s.words) words.push_back({{"token", token}, {"weight", weight}});
      json sentence = {{"index", s.index}, {"text", s.text}, {"intensity", s.intensity}, {"words", words}};
      if (s.index < static_cast<std::size_t>(src.sentence_weights.size()))
        sentence["weight"] = src.sentence_weights[static_cast<Eigen::Index>(s.index)];
      sentences.push_back(std::move(sentence));
    }
    e["sentences"] = sentences;
    evidence.push_back(std::move(e));
  }
  j["evidence"] = evidence;
  j["retrieval"] = {{"results", r.retrieval.results},
                    {"extracted", r.retrieval.extracted},
                    {"failed", r.retrieval.failed},
                    {"snippets", r.retrieval.snippets}};
  j["model"] = r.model;
  return j;
}

json to_json(const AnalyzeArticleResponse& r) {
  json j;
  j["request_id"] = r.request_id;
  j["title"] = r.title ? json(*r.title) : json(nullptr);
  json claims = json::array();
  for (const auto& c : r.claims)
    claims.push_back({{"sentence", c.sentence}, {"index", c.index}, {"score", c.score}, {"selected", c.selected}});
  j["claims"] = claims;
  if (r.analysis) j["analysis"] = to_json(*r.analysis);
  return j;
}

json to_json(const HealthReport& r) {
  json models = json::object();
  for (const auto& a : r.assets) models[a.name] = {{"loaded", a.loaded}, {"detail", a.detail}};
  return {{"status", r.status}, {"models", models}, {"missing", r.missing}, {"backend", r.backend},
          {"version", r.version}};
}

}  // namespace factcheck::service
