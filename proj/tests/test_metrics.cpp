#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cmath>
#include <random>
#include <thread>

#include <nlohmann/json.hpp>

#include "factprobe/errors.hpp"
#include "factprobe/io.hpp"
#include "factprobe/metrics.hpp"
#include "support.hpp"

using namespace factprobe;
using namespace factprobe::metrics;

TEST_CASE("mock_overlap_score examples") {
    CHECK(mock_overlap_score("the cat sat", "the cat sat on the mat") == 1.0);
    CHECK(mock_overlap_score("a b", "a c") == 0.5);
    CHECK(mock_overlap_score("x y z", "z q x") == doctest::Approx(2.0 / 3.0));
    CHECK(mock_overlap_score("river stone", "copper window") == 0.0);
    CHECK(mock_overlap_score("Cat, sat!", "cat sat") == 1.0); // punctuation stripped
    CHECK_THROWS_AS(mock_overlap_score("...", "anything"), EmptyInputError);
}

TEST_CASE("mock_overlap_score is 1 on identical claims and monotone in evidence") {
    std::mt19937 rng(17);
    for (int i = 0; i < 100; ++i) {
        std::string claim = testsupport::random_sentence(rng);
        std::string evidence = testsupport::random_sentence(rng);
        std::string extra = testsupport::random_sentence(rng);
        CHECK(mock_overlap_score(claim, claim) == 1.0);
        // Appending text to the evidence never decreases the score.
        double base = mock_overlap_score(claim, evidence);
        CHECK(mock_overlap_score(claim, evidence + " " + extra) >= base);
        CHECK(base >= 0.0);
        CHECK(base <= 1.0);
    }
}

TEST_CASE("score() validates inputs and range") {
    MockOverlapMetric mock;
    CHECK_THROWS_AS(score(mock, "", "evidence"), EmptyInputError);
    CHECK_THROWS_AS(score(mock, "claim", "  "), EmptyInputError);
    ScoreValue value = score(mock, "the cat", "the cat sat");
    CHECK(value.value == 1.0);
    CHECK(value.metric_name == "mock_overlap");

    struct BrokenAdapter : MetricAdapter {
        const std::string& name() const override {
            static std::string n = "broken";
            return n;
        }
        double score_pair(const std::string&, const std::string&) override { return 1.5; }
    } broken;
    CHECK_THROWS_AS(score(broken, "a", "b"), ScoreOutOfRangeError);
}

TEST_CASE("normalize_bartscore maps log-likelihoods into (0, 1]") {
    CHECK(normalize_bartscore(0.0) == 1.0);
    CHECK(normalize_bartscore(-0.5) == doctest::Approx(0.6065306597126334).epsilon(1e-12));
    CHECK(normalize_bartscore(-20.0) == doctest::Approx(2.061153622438558e-09).epsilon(1e-12));
    CHECK_THROWS_AS(normalize_bartscore(std::nan("")), NonFiniteInputError);
    CHECK_THROWS_AS(normalize_bartscore(std::numeric_limits<double>::infinity()),
                    NonFiniteInputError);

    // Positive inputs clamp to 0 with a warning.
    testsupport::LogCapture capture;
    CHECK(normalize_bartscore(0.3) == 1.0);
    CHECK(capture.contains("bartscore_clamped"));

    // Strictly increasing on nonpositive inputs.
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> ll(-30.0, 0.0);
    for (int i = 0; i < 100; ++i) {
        double a = ll(rng);
        double b = ll(rng);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        CHECK(normalize_bartscore(a) < normalize_bartscore(b));
    }
}

TEST_CASE("registry lists the seven built-in adapters") {
    auto names = builtin_registry().list_adapters();
    CHECK(names == std::vector<std::string>{"alignscore", "bartscore", "minicheck",
                                            "mock_overlap", "summac_conv", "summac_zs",
                                            "unieval"});
}

TEST_CASE("registry resolves and rejects names") {
    auto adapter = builtin_registry().create({.name = "mock_overlap"});
    CHECK(adapter->name() == "mock_overlap");
    CHECK(adapter->evidence_mode() == EvidenceMode::snippet);
    CHECK_THROWS_AS(builtin_registry().create({.name = "nope"}), UnknownAdapterError);

    AdapterRegistry fresh;
    fresh.register_adapter("custom", [](const AdapterConfig&) {
        return std::make_unique<MockOverlapMetric>();
    });
    CHECK_THROWS_AS(fresh.register_adapter("custom",
                                           [](const AdapterConfig&) {
                                               return std::make_unique<MockOverlapMetric>();
                                           }),
                    DuplicateNameError);
    CHECK(fresh.create({.name = "custom"})->name() == "mock_overlap");
}

TEST_CASE("backend adapters require a transport") {
    CHECK_THROWS_AS(builtin_registry().create({.name = "alignscore"}), SchemaViolationError);
}

TEST_CASE("evidence mode defaults and overrides") {
    AdapterConfig config{.name = "minicheck", .fixture_path = "data/recorded/minicheck.jsonl"};
    CHECK(builtin_registry().create(config)->evidence_mode() == EvidenceMode::full_document);
    config.evidence_mode = EvidenceMode::snippet;
    CHECK(builtin_registry().create(config)->evidence_mode() == EvidenceMode::snippet);

    AdapterConfig align{.name = "alignscore", .fixture_path = "data/recorded/alignscore.jsonl"};
    CHECK(builtin_registry().create(align)->evidence_mode() == EvidenceMode::snippet);
}

TEST_CASE("recorded-fixture contract tests for the six backend metrics") {
    for (const std::string& metric : backend_metric_names()) {
        CAPTURE(metric);
        std::string fixture = "data/recorded/" + metric + ".jsonl";
        auto adapter = builtin_registry().create({.name = metric, .fixture_path = fixture});
        for (const auto& [number, line] : io::read_jsonl_lines(fixture)) {
            nlohmann::json entry = nlohmann::json::parse(line);
            ScoreValue value = score(*adapter, entry["claim"].get<std::string>(),
                                     entry["evidence"].get<std::string>());
            CHECK(std::abs(value.value - entry["expected_score"].get<double>()) <=
                  entry["tolerance"].get<double>());
        }
    }
}

TEST_CASE("recorded backend misses raise BackendFailure") {
    auto adapter = builtin_registry().create(
        {.name = "alignscore", .fixture_path = "data/recorded/alignscore.jsonl"});
    CHECK_THROWS_AS(score(*adapter, "unseen claim", "unseen evidence"), BackendFailureError);
}

TEST_CASE("http backend round-trips scores and reports failures") {
    httplib::Server server;
    std::string last_body;
    server.Post("/score", [&](const httplib::Request& req, httplib::Response& res) {
        last_body = req.body;
        nlohmann::json request = nlohmann::json::parse(req.body);
        if (request["metric"] == "bartscore") {
            res.set_content(R"({"score": -0.5})", "application/json");
        } else if (request["claim"] == "boom") {
            res.status = 500;
            res.set_content("backend exploded", "text/plain");
        } else {
            res.set_content(R"({"score": 0.42})", "application/json");
        }
    });
    int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    std::string endpoint = "http://127.0.0.1:" + std::to_string(port) + "/score";
    auto unieval = builtin_registry().create({.name = "unieval", .endpoint = endpoint});
    CHECK(score(*unieval, "claim", "evidence").value == 0.42);
    // The unieval adapter asks the backend for its consistency dimension.
    CHECK(nlohmann::json::parse(last_body)["dimension"] == "consistency");

    auto bart = builtin_registry().create({.name = "bartscore", .endpoint = endpoint});
    CHECK(score(*bart, "claim", "evidence").value ==
          doctest::Approx(0.6065306597126334).epsilon(1e-12));

    CHECK_THROWS_AS(score(*unieval, "boom", "evidence"), BackendFailureError);

    server.stop();
    server_thread.join();
}
