#include <doctest.h>

#include <atomic>
#include <cmath>
#include <set>
#include <thread>

#include "factcheck/io/checkpoint.hpp"
#include "factcheck/service/http_api.hpp"
#include "support/service_fixture.hpp"

#include <httplib.h>

using namespace factcheck;
using namespace factcheck::service;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  std::string line;
  while (std::getline(in, line)) ++n;
  return n;
}

void check_analysis_schema(const json& j) {
  REQUIRE(j.is_object());
  CHECK(j["request_id"].is_string());
  CHECK(j["request_id"].get<std::string>().size() == 32);
  CHECK(j["claim"].is_string());
  const auto verdict = j["verdict"].get<std::string>();
  CHECK((verdict == "true" || verdict == "false" || verdict == "unverifiable"));
  CHECK(j.contains("score") == (verdict != "unverifiable"));
  if (j.contains("score")) {
    const double s = j["score"].get<double>();
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    CHECK((verdict == "true") == (s >= 0.5));
  }
  CHECK(j["evidence"].is_array());
  for (const auto& e : j["evidence"]) {
    CHECK(e["url"].is_string());
    CHECK(e["snippets"].is_array());
    CHECK(!e["snippets"].empty());
    double max_intensity = 0.0;
    for (const auto& s : e["sentences"]) {
      const double v = s["intensity"].get<double>();
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
      max_intensity = std::max(max_intensity, v);
      CHECK(s["words"].is_array());
    }
    CHECK(max_intensity == 1.0);
  }
  CHECK(j["model"]["version"].is_string());
  CHECK(j["model"]["backend"] == "fixture");
}

json strip_ids(json j) {
  j.erase("request_id");
  if (j.contains("analysis")) j["analysis"].erase("request_id");
  return j;
}

}  // namespace

TEST_CASE("config reads the environment names") {
  const std::map<std::string, std::string> env = {{"BIND_ADDR", "0.0.0.0:9000"}, {"SADHAN_CKPT", "/m/s.ckpt"},
                                                  {"SEARCH_BACKEND", "live"},    {"SEARCH_API_KEY", "k"},
                                                  {"FEEDBACK_LOG", "/tmp/f.jsonl"}, {"WORTHINESS_CKPT", ""}};
  const auto c = ServiceConfig::from_lookup([&](const char* name) -> std::optional<std::string> {
    auto it = env.find(name);
    if (it == env.end()) return std::nullopt;
    return it->second;
  });
  CHECK(c.bind_addr == "0.0.0.0:9000");
  CHECK(c.sadhan_ckpt == fs::path("/m/s.ckpt"));
  CHECK(!c.worthiness_ckpt);
  CHECK(c.search_backend == "live");
  CHECK(c.search_api_key == "k");
  CHECK(c.feedback_log == fs::path("/tmp/f.jsonl"));
  CHECK_THROWS_AS(ServiceConfig::from_lookup([](const char* n) -> std::optional<std::string> {
                    if (std::string(n) == "SEARCH_BACKEND") return "bing";
                    return std::nullopt;
                  }),
                  std::invalid_argument);
  CHECK(parse_bind_addr("0.0.0.0:9000") == std::pair<std::string, int>{"0.0.0.0", 9000});
  CHECK(parse_bind_addr("8081") == std::pair<std::string, int>{"127.0.0.1", 8081});
  CHECK_THROWS(parse_bind_addr("host:port"));
}

TEST_CASE("request ids are 128-bit lowercase hex and distinct") {
  std::set<std::string> ids;
  for (int i = 0; i < 1000; ++i) {
    const auto id = random_request_id();
    REQUIRE(id.size() == 32);
    CHECK(id.find_first_not_of("0123456789abcdef") == std::string::npos);
    ids.insert(id);
  }
  CHECK(ids.size() == 1000);
}

TEST_CASE("feedback record json round trip") {
  FeedbackRecord r{"abc", FeedbackKind::kClaimScore, true, std::string("nice"), "2024-01-02T03:04:05Z", "x rose."};
  CHECK(feedback_from_json(json::parse(to_json(r).dump())) == r);
  r.text.reset();
  CHECK(feedback_from_json(to_json(r)) == r);
  CHECK_THROWS_AS(feedback_from_json(json{{"request_id", "a"}, {"kind", "verdict"}}), std::invalid_argument);
  CHECK_THROWS_AS(feedback_from_json(json{{"request_id", "a"}, {"kind", "mood"}, {"agree", true}}),
                  std::invalid_argument);
}

TEST_CASE("health reports ok, degraded and backend mode") {
  auto full = PipelineService::from_config(testsupport::service_config("health.jsonl"));
  const auto ok = full->health();
  CHECK(ok.status == "ok");
  CHECK(ok.backend == "fixture");
  CHECK(ok.missing.empty());
  const auto j = to_json(ok);
  CHECK(j["models"]["sadhan"]["detail"] ==
        io::file_fingerprint(testsupport::service_assets().dir / "sadhan.ckpt"));

  auto config = testsupport::service_config("health2.jsonl");
  config.worthiness_ckpt.reset();
  auto partial = PipelineService::from_config(config);
  const auto degraded = partial->health();
  CHECK(degraded.status == "degraded");
  CHECK(degraded.missing == std::vector<std::string>{"worthiness"});

  config.sadhan_ckpt = testsupport::service_assets().dir / "no_such.ckpt";
  const auto broken = PipelineService::from_config(config)->health();
  CHECK(std::find(broken.missing.begin(), broken.missing.end(), "sadhan") != broken.missing.end());
}

TEST_CASE("analyze_claim on a verbatim fixture sentence returns scored evidence") {
  auto service = PipelineService::from_config(testsupport::service_config("claim.jsonl"));
  const auto claim = testsupport::fixture_sentence("page_00.html");
  const auto r = service->analyze_claim({claim, std::nullopt, {}});
  REQUIRE(r.verdict != Verdict::kUnverifiable);
  REQUIRE(r.score);
  CHECK(*r.score >= 0.0);
  CHECK(*r.score <= 1.0);
  CHECK(!r.evidence.empty());
  CHECK(r.retrieval.results > 0);
  CHECK(r.retrieval.results <= 10);
  bool verbatim = false;
  for (const auto& e : r.evidence)
    for (const auto& s : e.snippets)
      if (s.similarity >= 1.0 - 1e-12) verbatim = true;
  CHECK(verbatim);
  check_analysis_schema(to_json(r));
}

TEST_CASE("analyze_claim without overlapping pages is unverifiable") {
  auto service = PipelineService::from_config(testsupport::service_config("none.jsonl"));
  const auto r = service->analyze_claim({"Zebras juggle marmalade quietly", std::nullopt, {}});
  CHECK(r.verdict == Verdict::kUnverifiable);
  CHECK(!r.score);
  CHECK(r.evidence.empty());
  const auto j = to_json(r);
  CHECK(j["verdict"] == "unverifiable");
  CHECK(!j.contains("score"));
  check_analysis_schema(j);
}

TEST_CASE("analyze_claim is deterministic modulo the request id") {
  auto a = PipelineService::from_config(testsupport::service_config("det_a.jsonl"));
  auto b = PipelineService::from_config(testsupport::service_config("det_b.jsonl"));
  const auto claim = testsupport::fixture_sentence("page_03.html", 1);
  const auto ra = to_json(a->analyze_claim({claim, std::nullopt, {}}));
  const auto rb = to_json(b->analyze_claim({claim, std::nullopt, {}}));
  const auto ra2 = to_json(a->analyze_claim({claim, std::nullopt, {}}));
  CHECK(ra["request_id"] != ra2["request_id"]);
  CHECK(strip_ids(ra).dump() == strip_ids(rb).dump());
  CHECK(strip_ids(ra).dump() == strip_ids(ra2).dump());
}

TEST_CASE("page_url supplies the domain aspect") {
  auto service = PipelineService::from_config(testsupport::service_config("domain.jsonl"));
  const auto claim = testsupport::fixture_sentence("page_00.html");
  const auto with_url = service->analyze_claim({claim, std::string("https://www.news.example.com/x"), {}});
  const auto without = service->analyze_claim({claim, std::nullopt, {}});
  // With only the domain aspect active, predict runs one pass per document;
  // without aspects it averages all three UNK-backed kinds.
  CHECK(with_url.aspect_probabilities.size() == 1);
  CHECK(with_url.aspect_probabilities.count(sadhan::AspectKind::kDomain) == 1);
  CHECK(without.aspect_probabilities.size() == 3);
}

TEST_CASE("analyze_claim error classes") {
  auto service = PipelineService::from_config(testsupport::service_config("errors.jsonl"));
  auto status_of = [](auto&& fn) {
    try {
      fn();
    } catch (const ServiceError& e) {
      return e.status();
    }
    return 0;
  };
  CHECK(status_of([&] { service->analyze_claim({"   \t", std::nullopt, {}}); }) == 400);

  auto config = testsupport::service_config("errors2.jsonl");
  config.sadhan_ckpt.reset();
  config.embeddings_path.reset();
  auto no_model = PipelineService::from_config(config);
  CHECK(status_of([&] { no_model->analyze_claim({"Vaccines work", std::nullopt, {}}); }) == 503);
  CHECK(status_of([&] { no_model->analyze_article({std::nullopt, std::string("A b c."), 0.5, 5, {}}); }) == 503);

  struct FailingBackend : retrieval::SearchBackend {
    std::vector<retrieval::SearchResult> search(std::string_view, std::size_t) const override {
      throw RetrievalError("backend down", 500);
    }
    std::string fetch_page(std::string_view) const override { throw RetrievalError("backend down", 500); }
    std::string_view mode() const override { return "live"; }
  };
  ServiceComponents c = service->components();
  c.search = std::make_shared<FailingBackend>();
  c.feedback_log = testsupport::service_assets().dir / "errors3.jsonl";
  PipelineService failing(c);
  CHECK(status_of([&] { failing.analyze_claim({"Vaccines work", std::nullopt, {}}); }) == 502);
  CHECK(status_of([&] {
          failing.analyze_article({std::string("https://x.example.com/a"), std::nullopt, 0.5, 5, {}});
        }) == 422);
}

TEST_CASE("one failing page does not fail the request") {
  auto service = PipelineService::from_config(testsupport::service_config("partial.jsonl"));
  struct FlakyBackend : retrieval::SearchBackend {
    std::shared_ptr<const retrieval::SearchBackend> inner;
    std::vector<retrieval::SearchResult> search(std::string_view q, std::size_t k) const override {
      auto r = inner->search(q, k);
      for (auto& x : r) x.raw_html.clear();  // force fetches
      return r;
    }
    std::string fetch_page(std::string_view url) const override {
      static std::atomic<int> calls{0};
      if (calls++ == 0) throw RetrievalError("timeout", 0);
      return inner->fetch_page(url);
    }
    std::string_view mode() const override { return "fixture"; }
  };
  auto flaky = std::make_shared<FlakyBackend>();
  flaky->inner = service->components().search;
  ServiceComponents c = service->components();
  c.search = flaky;
  PipelineService tolerant(c);
  const auto r = tolerant.analyze_claim({testsupport::fixture_sentence("page_00.html"), std::nullopt, {}});
  CHECK(r.retrieval.failed == 1);
  CHECK(r.retrieval.extracted + 1 == r.retrieval.results);
  CHECK(r.verdict != Verdict::kUnverifiable);
}

TEST_CASE("analyze_article threshold and top_k") {
  auto service = PipelineService::from_config(testsupport::service_config("article.jsonl"));
  const auto text = testsupport::read_text(testsupport::fixture_dir() / "articles" / "planted_claim.txt");

  const auto top3 = service->analyze_article({std::nullopt, text, 0.0, 3, {}});
  REQUIRE(top3.claims.size() == 3);
  CHECK(top3.claims[0].selected);
  CHECK(!top3.claims[1].selected);
  CHECK(top3.claims[0].score >= top3.claims[1].score);
  CHECK(top3.claims[1].score >= top3.claims[2].score);
  REQUIRE(top3.analysis);
  CHECK(top3.analysis->claim == top3.claims[0].sentence);

  const auto none = service->analyze_article({std::nullopt, text, 1.0, 5, {}});
  CHECK(none.claims.empty());
  CHECK(!none.analysis);
  CHECK(!to_json(none).contains("analysis"));
}

TEST_CASE("planted claim ranks first after toy training") {
  auto service = PipelineService::from_config(testsupport::service_config("planted.jsonl"));
  const auto text = testsupport::read_text(testsupport::fixture_dir() / "articles" / "planted_claim.txt");
  const auto r = service->analyze_article({std::nullopt, text, 0.0, 10, {}});
  REQUIRE(r.claims.size() == 10);
  CHECK(r.claims[0].index == 0);
  CHECK(r.claims[0].sentence == "Unemployment fell by 12 percent over the last two years.");
}

TEST_CASE("analyze_article by url fetches through the backend") {
  auto service = PipelineService::from_config(testsupport::service_config("by_url.jsonl"));
  const auto r = service->analyze_article({std::string("https://vaccine-news0.example.com/articles/0"), std::nullopt,
                                           0.0, 2, {}});
  CHECK(r.claims.size() == 2);
  CHECK(r.title == std::optional<std::string>("Vaccine report 0"));
  auto status = 0;
  try {
    service->analyze_article({std::string("https://missing.example.com/"), std::nullopt, 0.5, 5, {}});
  } catch (const ServiceError& e) {
    status = e.status();
  }
  CHECK(status == 422);
}

TEST_CASE("http routes: schema and error classes") {
  auto service = PipelineService::from_config(testsupport::service_config("http.jsonl"));
  HttpApi api(*service);

  const auto health = api.handle("GET", "/api/v1/health", "");
  CHECK(health.status == 200);
  CHECK(health.body["status"] == "ok");
  CHECK(health.body["backend"] == "fixture");

  const auto claim = api.handle("POST", "/api/v1/analyze/claim",
                                json{{"claim_text", testsupport::fixture_sentence("page_00.html")}}.dump());
  CHECK(claim.status == 200);
  check_analysis_schema(claim.body);

  const auto unverifiable =
      api.handle("POST", "/api/v1/analyze/claim", json{{"claim_text", "Zebras juggle marmalade quietly"}}.dump());
  CHECK(unverifiable.status == 200);
  CHECK(unverifiable.body["verdict"] == "unverifiable");
  CHECK(!unverifiable.body.contains("score"));

  const auto article = api.handle(
      "POST", "/api/v1/analyze/article",
      json{{"article_text", testsupport::read_text(testsupport::fixture_dir() / "articles" / "planted_claim.txt")},
           {"claim_threshold", 0.0},
           {"top_k", 3}}
          .dump());
  CHECK(article.status == 200);
  CHECK(article.body["claims"].size() == 3);
  CHECK(article.body["claims"][0]["selected"] == true);
  check_analysis_schema(article.body["analysis"]);

  const fs::path log = service->components().feedback_log;
  const auto fb = api.handle(
      "POST", "/api/v1/feedback",
      json{{"request_id", claim.body["request_id"]}, {"kind", "verdict"}, {"agree", false}, {"text", "wrong"}}.dump());
  CHECK(fb.status == 200);
  CHECK(fb.body["status"] == "recorded");
  const auto records = FeedbackLog::read_all(log);
  REQUIRE(records.size() == 1);
  CHECK(records[0].request_id == claim.body["request_id"].get<std::string>());
  CHECK(records[0].claim_text == claim.body["claim"].get<std::string>());
  CHECK(records[0].text == std::optional<std::string>("wrong"));
  CHECK(!records[0].agree);

  auto status = [&](const char* method, const char* path, const std::string& body) {
    return api.handle(method, path, body).status;
  };
  CHECK(status("POST", "/api/v1/analyze/claim", "{not json") == 400);
  CHECK(status("POST", "/api/v1/analyze/claim", "[]") == 400);
  CHECK(status("POST", "/api/v1/analyze/claim", R"({"claim_text": 5})") == 400);
  CHECK(status("POST", "/api/v1/analyze/claim", R"({"claim_text": "  "})") == 400);
  CHECK(status("POST", "/api/v1/analyze/claim", R"({"claim_text": "x", "aspects": {"mood": "y"}})") == 400);
  CHECK(status("POST", "/api/v1/analyze/article", R"({"article_text": "a", "article_url": "b"})") == 400);
  CHECK(status("POST", "/api/v1/analyze/article", R"({})") == 400);
  CHECK(status("POST", "/api/v1/analyze/article", R"({"article_text": "A b.", "top_k": 0})") == 400);
  CHECK(status("POST", "/api/v1/analyze/article", R"({"article_text": "A b.", "claim_threshold": 1.5})") == 400);
  CHECK(status("POST", "/api/v1/analyze/article", R"({"article_url": "https://nowhere.example.com/"})") == 422);
  CHECK(status("POST", "/api/v1/feedback", R"({"request_id": "x", "kind": "verdict"})") == 400);
  CHECK(status("GET", "/api/v1/analyze/claim", "") == 405);
  CHECK(status("GET", "/api/v2/health", "") == 404);

  const auto before = line_count(log);
  const auto unknown =
      api.handle("POST", "/api/v1/feedback", json{{"request_id", std::string(32, 'f')}, {"kind", "verdict"}, {"agree", true}}.dump());
  CHECK(unknown.status == 404);
  CHECK(unknown.body["error"]["code"] == "unknown_request");
  CHECK(line_count(log) == before);
}

TEST_CASE("100 concurrent feedback writers leave 100 intact lines") {
  auto service = PipelineService::from_config(testsupport::service_config("concurrent.jsonl"));
  HttpApi api(*service);
  const auto issued = service->analyze_claim({"Zebras juggle marmalade quietly", std::nullopt, {}});
  std::vector<std::thread> writers;
  std::atomic<int> ok{0};
  for (int i = 0; i < 100; ++i) {
    writers.emplace_back([&, i] {
      // Long payloads make torn or interleaved writes visible.
      const std::string text(4096 + i, static_cast<char>('a' + i % 26));
      const auto r = api.handle("POST", "/api/v1/feedback",
                                json{{"request_id", issued.request_id},
                                     {"kind", i % 2 ? "verdict" : "claim_score"},
                                     {"agree", i % 3 == 0},
                                     {"text", text}}
                                    .dump());
      if (r.status == 200) ++ok;
    });
  }
  for (auto& t : writers) t.join();
  CHECK(ok == 100);
  const auto log = service->components().feedback_log;
  CHECK(line_count(log) == 100);
  const auto records = FeedbackLog::read_all(log);
  REQUIRE(records.size() == 100);
  std::set<std::size_t> lengths;
  for (const auto& r : records) {
    REQUIRE(r.text);
    CHECK(r.text->find_first_not_of(r.text->front()) == std::string::npos);
    lengths.insert(r.text->size());
  }
  CHECK(lengths.size() == 100);
}

TEST_CASE("http server answers with CORS headers") {
  auto service = PipelineService::from_config(testsupport::service_config("server.jsonl"));
  HttpApi api(*service, "chrome-extension://abc");
  httplib::Server server;
  api.install(server);
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread thread([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto health = client.Get("/api/v1/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(health->get_header_value("Access-Control-Allow-Origin") == "chrome-extension://abc");
  CHECK(json::parse(health->body)["status"] == "ok");

  auto preflight = client.Options("/api/v1/analyze/claim");
  REQUIRE(preflight);
  CHECK(preflight->status == 204);
  CHECK(preflight->get_header_value("Access-Control-Allow-Methods").find("POST") != std::string::npos);

  auto bad = client.Post("/api/v1/analyze/claim", "{}", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  CHECK(json::parse(bad->body)["error"]["code"] == "invalid_request");

  auto missing = client.Get("/nope");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(json::parse(missing->body).contains("error"));

  server.stop();
  thread.join();
}
