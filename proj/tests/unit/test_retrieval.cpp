#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "factcheck/error.hpp"
#include "factcheck/retrieval/extract.hpp"
#include "factcheck/retrieval/search.hpp"
#include "factcheck/retrieval/snippets.hpp"
#include "factcheck/text/sentence.hpp"
#include "support/snippet_oracle.hpp"

// After Eigen: <resolv.h> defines a `_res` macro that clashes with it.
#include <httplib.h>

using namespace factcheck;
using namespace factcheck::retrieval;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = FACTCHECK_FIXTURE_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> sentence_texts(const Article& a) {
  std::vector<std::string> out;
  for (const auto& s : a.sentences) out.push_back(s.text);
  return out;
}

// Serves canned responses on an ephemeral port for the duration of a test.
struct LocalServer {
  httplib::Server server;
  int port = 0;
  std::thread thread;

  LocalServer() = default;
  void start() {
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~LocalServer() {
    server.stop();
    if (thread.joinable()) thread.join();
  }
  std::string base() const { return "http://127.0.0.1:" + std::to_string(port); }
};

}  // namespace

TEST_CASE("extraction basics") {
  const auto a = extract_article({"https://www.example.com/x", "", "<html><title>T</title><p>A. B.</p></html>", 1});
  CHECK(a.title == "T");
  CHECK(sentence_texts(a) == std::vector<std::string>{"A.", "B."});
  CHECK(a.domain == "example.com");
  CHECK_FALSE(a.publication_date.has_value());
  CHECK(a.authors.empty());

  const auto m = extract_article({"u://h", "", R"(<meta name="author" content="X"><p>Text here.</p>)", 1});
  CHECK(m.authors == std::vector<std::string>{"X"});

  const auto plain = extract_article({"fixture://p.txt", "Given title", "Just prose. No markup!", 1});
  CHECK(plain.title == "Given title");
  CHECK(sentence_texts(plain) == std::vector<std::string>{"Just prose.", "No markup!"});

  CHECK_THROWS_AS(extract_article({"u://h", "", "<html><script>x()</script></html>", 1}), ExtractionError);
  CHECK_THROWS_AS(extract_article({"u://h", "", "   ", 1}), ExtractionError);
}

TEST_CASE("extraction matches the golden files") {
  std::size_t cases = 0;
  for (const auto& e : fs::directory_iterator(kFixtures / "extraction")) {
    if (e.path().extension() != ".html") continue;
    ++cases;
    std::istringstream golden(slurp(fs::path(e.path()).replace_extension(".txt")));
    std::string title, authors, date, line;
    std::getline(golden, title);
    std::getline(golden, authors);
    std::getline(golden, date);
    std::getline(golden, line);  // blank separator
    std::vector<std::string> sentences;
    while (std::getline(golden, line))
      if (!line.empty()) sentences.push_back(line);

    INFO(e.path().filename().string());
    const auto a = extract_article({"https://example.org/" + e.path().filename().string(), "", slurp(e.path()), 1});
    CHECK("title: " + a.title == title);
    std::string joined;
    for (const auto& au : a.authors) joined += (joined.empty() ? "" : "; ") + au;
    CHECK("authors: " + joined == authors);
    CHECK("date: " + a.publication_date.value_or("") == date);
    CHECK(sentence_texts(a) == sentences);
  }
  CHECK(cases == 10);
}

TEST_CASE("registrable domains") {
  CHECK(registrable_domain("https://www.Example.COM/path") == "example.com");
  CHECK(registrable_domain("http://news.bbc.co.uk/a") == "bbc.co.uk");
  CHECK(registrable_domain("https://a.b.c.example.org:8080/") == "example.org");
  CHECK(registrable_domain("not a url") == "");
}

TEST_CASE("entity decoding and visible text") {
  CHECK(decode_entities("a&amp;b &lt;&gt; &#65;&#x42; &nbsp;x &unknown;") == "a&b <> AB  x &unknown;");
  CHECK(visible_text("<p>a<script>b</script> c</p><style>d</style>") == "a c");
}

TEST_CASE("fixture search ranks by term overlap") {
  const auto dir = fs::temp_directory_path() / "factcheck_unit" / "mini_index";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "b.html") << "<p>Measles vaccine doses rose.</p>";
  std::ofstream(dir / "a.html") << "<p>Vaccine news.</p>";
  std::ofstream(dir / "c.html") << "<p>Rocket launch delayed.</p>";
  std::ofstream(dir / "d.html") << "<p>Measles vaccine doses.</p>";
  const FixtureIndex index(dir);
  CHECK(index.size() == 4);

  const auto r = index.search("Measles vaccine doses rose", 10);
  REQUIRE(r.size() == 3);
  CHECK(r[0].url == "fixture://b.html");
  CHECK(r[1].url == "fixture://d.html");
  CHECK(r[2].url == "fixture://a.html");
  for (std::size_t i = 0; i < r.size(); ++i) CHECK(r[i].rank == i + 1);
  CHECK(index.search("the of and", 10).empty());
  CHECK(index.fetch_page("fixture://c.html").find("Rocket") != std::string::npos);
  CHECK(index.fetch_page("c.html") == index.fetch_page("fixture://c.html"));
  try {
    index.fetch_page("fixture://missing.html");
    FAIL("expected an error");
  } catch (const RetrievalError& e) {
    CHECK(e.status() == 404);
  }
}

TEST_CASE("fixture search over the bundled corpus") {
  const FixtureIndex index(kFixtures / "web");
  CHECK(index.size() == 50);
  const auto r = index.search("vaccine doses measles climate emissions economy jobs rocket orbit", 10);
  CHECK(r.size() == 10);
  CHECK(r[0].url.rfind("https://", 0) == 0);
  CHECK(index.search("vaccine", 3).size() == 3);

  const std::string quoted = "He said \"vaccines cause autism\" today";
  index.search(quoted, 10);
  CHECK(index.last_query() == quoted);
}

TEST_CASE("live search backend against a local server") {
  LocalServer srv;
  std::atomic<int> hits{0};
  std::string seen_query, seen_key, seen_num;
  srv.server.Get("/search", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    seen_query = req.get_param_value("q");
    seen_key = req.get_param_value("key");
    seen_num = req.get_param_value("num");
    res.set_content(R"({"items": [{"link": "https://a.example/1", "title": "One"}, {"title": "no link"},
                                  {"link": "https://b.example/2", "title": "Two"}]})",
                    "application/json");
  });
  srv.server.Get("/alt", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"results": [{"url": "https://c.example/", "title": "C"}]})", "application/json");
  });
  srv.server.Get("/quota", [&](const httplib::Request&, httplib::Response& res) {
    ++hits;
    res.status = 429;
  });
  srv.server.Get("/page", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("<p>Page body.</p>", "text/html");
  });
  srv.start();

  const LiveSearchBackend live(srv.base() + "/search", "secret", std::chrono::seconds(2));
  const std::string query = "Did \"X\" & Y happen?";
  const auto r = live.search(query, 10);
  REQUIRE(r.size() == 2);
  CHECK(r[0].url == "https://a.example/1");
  CHECK(r[1].rank == 2);
  CHECK(seen_query == query);
  CHECK(seen_key == "secret");
  CHECK(seen_num == "10");
  CHECK(live.search(query, 1).size() == 1);
  CHECK(live.mode() == "live");

  CHECK(LiveSearchBackend(srv.base() + "/alt", "").search("q", 5).at(0).url == "https://c.example/");
  CHECK(live.fetch_page(srv.base() + "/page") == "<p>Page body.</p>");

  hits = 0;
  try {
    LiveSearchBackend(srv.base() + "/quota", "", std::chrono::seconds(2)).search("q", 10);
    FAIL("expected an error");
  } catch (const RetrievalError& e) {
    CHECK(e.status() == 429);
  }
  CHECK(hits == 2);  // one retry

  CHECK_THROWS_AS(LiveSearchBackend("http://127.0.0.1:1/none", "", std::chrono::milliseconds(300)).search("q", 10),
                  RetrievalError);
}

TEST_CASE("sentence vectors") {
  auto vocab = std::make_shared<const text::Vocabulary>(text::Vocabulary::from_tokens({"u", "v"}));
  const auto table = text::random_embeddings(vocab, 5, 3);
  CHECK(sentence_vector({"u"}, table) == table.row("u").transpose());
  CHECK(sentence_vector({}, table).isZero(0.0));
  CHECK(sentence_vector({"u", "v"}, table).isApprox(((table.row("u") + table.row("v")) / 2).transpose(), 1e-15));
}

TEST_CASE("snippet filter examples") {
  std::ifstream emb(kFixtures / "embeddings.txt");
  const auto table = text::load_word_vectors(emb, 16);
  Article a;
  a.url = "u";
  for (const char* s : {"Vaccine doses rose by 5 percent.", "Rocket launch orbit mission.", "Carbon emissions warming."})
    a.sentences.push_back({s, a.sentences.size()});

  const auto verbatim = filter_snippets(text::tokenize("Vaccine doses rose by 5 percent."), a, table);
  REQUIRE(verbatim.size() == 1);
  CHECK(verbatim[0].start == 0);
  CHECK(verbatim[0].end == 0);
  CHECK(verbatim[0].similarity == doctest::Approx(1.0).epsilon(1e-12));

  auto xy = std::make_shared<const text::Vocabulary>(text::Vocabulary::from_tokens({"x", "y"}));
  Matrix w = Matrix::Zero(4, 2);
  w(2, 0) = 1.0;
  w(3, 1) = 1.0;
  const text::EmbeddingTable ortho(xy, w);
  Article b;
  b.sentences = {{"y y", 0}, {"y", 1}};
  CHECK(filter_snippets({"x"}, b, ortho).empty());
  CHECK(filter_snippets({}, a, table).empty());
  CHECK(filter_snippets(text::tokenize("vaccine"), a, table, 1.0).empty());

  const auto all = filter_snippets(text::tokenize("vaccine"), a, table, 0.0);
  for (const auto& s : all) CHECK(s.similarity > 0.0);
  CHECK_THROWS(filter_snippets({}, a, table, 1.5));
}

TEST_CASE("snippet filter equals the brute-force oracle on fixture pages") {
  std::ifstream emb(kFixtures / "embeddings.txt");
  const auto table = text::load_word_vectors(emb, 16);
  const FixtureIndex index(kFixtures / "web");
  std::size_t kept = 0;
  for (const auto& r : index.search("vaccine climate economy election rocket", 10)) {
    const auto article = extract_article(r);
    for (const auto& claim : {article.sentences.front().text, std::string("Measles vaccine doses rose")}) {
      const auto tokens = text::tokenize(claim);
      const auto got = filter_snippets(tokens, article, table);
      CHECK(got == testsupport::brute_force_snippets(tokens, article, table, 0.75));
      kept += got.size();
    }
  }
  CHECK(kept > 0);
}
