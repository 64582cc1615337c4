#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <set>

#include "crl/basis/basis.hpp"
#include "crl/basis/descriptors.hpp"
#include "crl/basis/llm_client.hpp"
#include "crl/basis/prompts.hpp"
#include "crl/basis/transcript.hpp"
#include "crl/core/error.hpp"
#include "crl/core/linalg.hpp"
#include "test_support.hpp"

namespace crl::basis {
namespace {

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

TEST(LlmPrompt, DefaultColor) {
  const auto p = render_llm_prompt(make_criterion("color"), LlmPromptTemplate::standard());
  EXPECT_EQ(p,
            "Please generate common expressions to describe the color, as many as possible, formatted as: "
            "[\"...\", \"...\", \"...\"]. Ensure all items are unique and written in a single line, without any "
            "nested lists or additional formatting. You may describe the same color in different ways, such as "
            "\"red\", \"crimson\", or \"scarlet\". Only generate the list, and do not include any additional "
            "information.");
}

TEST(LlmPrompt, DefaultTextureAndScene) {
  const auto t = render_llm_prompt(make_criterion("texture"), LlmPromptTemplate::standard());
  EXPECT_TRUE(contains(t, "describe the texture"));
  EXPECT_TRUE(contains(t, "\"baroque\", \"ornate\", or \"luxurious\""));
  const auto s = render_llm_prompt(make_criterion("scene"), LlmPromptTemplate::standard());
  EXPECT_TRUE(contains(s, "\"a cozy living room\", \"a snug lounge\", or \"a warm and inviting sitting area\""));
}

TEST(LlmPrompt, FixedCount) {
  const auto p = render_llm_prompt(make_criterion("color"), LlmPromptTemplate::fixed(100));
  EXPECT_TRUE(contains(p, "Please generate 100 expressions to describe the color, formatted as:"));
  EXPECT_FALSE(contains(p, "as many as possible"));
  EXPECT_EQ(LlmPromptTemplate::by_id("fixed-100").fixed_count, std::optional<std::size_t>(100));
}

TEST(LlmPrompt, UnknownCriterionDropsSynonymSentence) {
  const auto p = render_llm_prompt(make_criterion("suit"), LlmPromptTemplate::standard());
  EXPECT_TRUE(contains(p, "describe the suit"));
  EXPECT_FALSE(contains(p, "You may describe"));
  EXPECT_FALSE(contains(p, "{"));
  EXPECT_TRUE(contains(p, "formatting. Only generate the list"));
}

TEST(LlmPrompt, CustomSynonymsAndVariants) {
  Criterion c = make_criterion("suit");
  c.synonym_examples = {"hearts", "spades"};
  EXPECT_TRUE(contains(render_llm_prompt(c, LlmPromptTemplate::standard()), "such as \"hearts\" or \"spades\"."));
  for (int i = 1; i <= 5; ++i) {
    const auto t = LlmPromptTemplate::by_id("variant-" + std::to_string(i));
    const auto p = render_llm_prompt(make_criterion("color"), t);
    EXPECT_TRUE(contains(p, "color")) << p;
    EXPECT_TRUE(contains(p, "[\"...\", \"...\", \"...\"]")) << p;
  }
  EXPECT_TRUE(contains(render_llm_prompt(make_criterion("color"), LlmPromptTemplate::variant(5)),
                       "How do people usually talk about the color?"));
  EXPECT_THROW(LlmPromptTemplate::variant(6), Error);
  EXPECT_THROW(LlmPromptTemplate::by_id("nope"), Error);
  EXPECT_THROW(LlmPromptTemplate::fixed(0).validate(), Error);
}

TEST(VlmPrompt, PaperPhrasings) {
  EXPECT_EQ(render_vlm_prompts(make_criterion("color"), {"red"}),
            std::vector<std::string>{"Objects with the color of red."});
  EXPECT_EQ(render_vlm_prompts(make_criterion("texture", "A fashion"), {"smooth"}, VlmPromptTemplate::indefinite()),
            std::vector<std::string>{"A fashion with a texture of smooth."});
  EXPECT_EQ(render_vlm_prompts(make_criterion("scene", "A photo"), {"a cozy lounge"}, VlmPromptTemplate::indefinite()),
            std::vector<std::string>{"A photo with a scene of a cozy lounge."});
  EXPECT_EQ(render_vlm_prompts(make_criterion("color"), {"red", "green", "blue"})[2], "Objects with the color of blue.");
  EXPECT_THROW(render_vlm_prompts(make_criterion("color"), {}), Error);
  EXPECT_THROW(VlmPromptTemplate{"{subject} {criterion}"}.validate(), Error);
}

TEST(ParseDescriptors, DedupAndTrim) {
  EXPECT_EQ(parse_descriptor_list(R"(["red", "crimson", "red "])"), (std::vector<std::string>{"red", "crimson"}));
  EXPECT_EQ(parse_descriptor_list(R"(["Red", "RED", "red"])"), std::vector<std::string>{"Red"});
}

TEST(ParseDescriptors, SurroundingProse) {
  EXPECT_EQ(parse_descriptor_list(R"(Sure! ["a", "b"] hope this helps)"), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(parse_descriptor_list("Here [1] you go: [\"x\", \"y\",]"), (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(parse_descriptor_list(R"(["say \"hi\"", "bé"])"), (std::vector<std::string>{"say \"hi\"", "b\xc3\xa9"}));
}

TEST(ParseDescriptors, NoListIsParseErrorWithExcerpt) {
  try {
    parse_descriptor_list("no list here");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::parse);
    EXPECT_EQ(e.excerpt(), "no list here");
  }
  try {
    parse_descriptor_list(std::string(500, 'z'));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.excerpt().size(), 200u);
  }
}

TEST(MergeUnique, FirstOccurrenceWins) {
  std::vector<std::string> into{"a", "b"};
  EXPECT_EQ(merge_unique(into, {"B", "c", "a ", "d"}), 2u);
  EXPECT_EQ(into, (std::vector<std::string>{"a", "b", "c", "d"}));
}

class ScriptedBackend : public ChatBackend {
public:
  explicit ScriptedBackend(std::vector<std::string> replies) : replies_(std::move(replies)) {}
  std::string complete(const std::string& prompt) override {
    prompts.push_back(prompt);
    return replies_[std::min(calls++, replies_.size() - 1)];
  }
  std::size_t calls = 0;
  std::vector<std::string> prompts;

private:
  std::vector<std::string> replies_;
};

std::string list_of(std::size_t from, std::size_t to) {
  std::vector<std::string> items;
  for (std::size_t i = from; i < to; ++i) items.push_back("d" + std::to_string(i));
  return nlohmann::json(items).dump();
}

TEST(RequestDescriptors, SingleRoundWithoutTarget) {
  ScriptedBackend backend({R"(["a", "b", "a"])"});
  EXPECT_EQ(request_descriptors(make_criterion("color"), backend), (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(backend.calls, 1u);
  EXPECT_TRUE(contains(backend.prompts[0], "as many as possible"));
}

TEST(RequestDescriptors, TruncatesToTarget) {
  ScriptedBackend backend({list_of(0, 105)});
  DescriptorRequest req;
  req.target_count = 100;
  const auto d = request_descriptors(make_criterion("color"), backend, req);
  ASSERT_EQ(d.size(), 100u);
  EXPECT_EQ(d.front(), "d0");
  EXPECT_EQ(d.back(), "d99");
  EXPECT_TRUE(contains(backend.prompts[0], "generate 100 expressions"));
}

TEST(RequestDescriptors, UnionAcrossRounds) {
  ScriptedBackend backend({list_of(0, 60), list_of(40, 100)});
  DescriptorRequest req;
  req.target_count = 100;
  const auto d = request_descriptors(make_criterion("color"), backend, req);
  EXPECT_EQ(d.size(), 100u);
  EXPECT_EQ(std::set<std::string>(d.begin(), d.end()).size(), 100u);
  EXPECT_EQ(backend.calls, 2u);
}

TEST(RequestDescriptors, ExhaustionReportsAchieved) {
  ScriptedBackend backend({list_of(0, 10)});
  DescriptorRequest req;
  req.target_count = 100;
  try {
    request_descriptors(make_criterion("color"), backend, req);
    FAIL();
  } catch (const InsufficientDescriptorsError& e) {
    EXPECT_EQ(e.achieved(), 10u);
    EXPECT_EQ(e.target(), 100u);
  }
  EXPECT_EQ(backend.calls, 10u);
}

TEST(RequestDescriptors, UnparseableRoundsAreSkippedWhenChasingCount) {
  ScriptedBackend backend({"sorry, cannot help", list_of(0, 5)});
  DescriptorRequest req;
  req.target_count = 5;
  EXPECT_EQ(request_descriptors(make_criterion("color"), backend, req).size(), 5u);
  ScriptedBackend bad({"sorry"});
  EXPECT_THROW(request_descriptors(make_criterion("color"), bad), ParseError);
}

TEST(ChatWire, RequestAndResponseShapes) {
  LlmRequestConfig cfg;
  cfg.temperature = 0.7;
  const auto req = nlohmann::json::parse(build_chat_request("hi", cfg));
  EXPECT_EQ(req["model"], "gpt-4o");
  EXPECT_EQ(req["messages"][0]["role"], "user");
  EXPECT_EQ(req["messages"][0]["content"], "hi");
  EXPECT_DOUBLE_EQ(req["temperature"].get<double>(), 0.7);
  EXPECT_EQ(parse_chat_response(R"({"choices":[{"message":{"content":"x"}}]})"), "x");
  try {
    parse_chat_response(R"({"choices":[]})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::provider_contract);
  }
}

TEST(LlmConfig, TemperatureRange) {
  LlmRequestConfig cfg;
  cfg.temperature = 2.5;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.temperature = 0.0;
  EXPECT_NO_THROW(cfg.validate());
}

LlmRequestConfig fast_config(const std::string& url) {
  LlmRequestConfig cfg;
  cfg.endpoint_url = url;
  cfg.retry_backoff_ms = 1;
  cfg.timeout_ms = 5000;
  cfg.api_key_env = "CRL_TEST_LLM_KEY";
  return cfg;
}

TEST(HttpChatClient, SendsKeyAndReadsFirstChoice) {
  testing::EnvGuard key("CRL_TEST_LLM_KEY", "sk-test");
  std::string seen_auth;
  nlohmann::json seen_body;
  testing::MockHttpServer server([&](const testing::MockRequest& r) {
    seen_auth = r.authorization;
    seen_body = nlohmann::json::parse(r.body);
    return testing::MockResponse{200, R"({"choices":[{"message":{"role":"assistant","content":"[\"a\"]"}}]})"};
  });
  HttpChatClient client(fast_config(server.url("/v1/chat/completions")));
  EXPECT_EQ(client.complete("prompt"), "[\"a\"]");
  EXPECT_EQ(seen_auth, "Bearer sk-test");
  EXPECT_EQ(seen_body["messages"][0]["content"], "prompt");
}

TEST(HttpChatClient, RetriesServerErrorsThenSucceeds) {
  std::atomic<int> calls{0};
  testing::MockHttpServer server([&](const testing::MockRequest&) {
    if (calls++ < 2) return testing::MockResponse{503, "busy"};
    return testing::MockResponse{200, R"({"choices":[{"message":{"content":"ok"}}]})"};
  });
  HttpChatClient client(fast_config(server.url("/chat")));
  EXPECT_EQ(client.complete("p"), "ok");
  EXPECT_EQ(server.requests(), 3u);
}

TEST(HttpChatClient, GivesUpAfterRetries) {
  testing::MockHttpServer server([](const testing::MockRequest&) { return testing::MockResponse{500, "down"}; });
  auto cfg = fast_config(server.url("/chat"));
  cfg.max_retries = 2;
  HttpChatClient client(cfg);
  try {
    client.complete("p");
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_EQ(e.status(), 500);
  }
  EXPECT_EQ(server.requests(), 3u);
}

TEST(HttpChatClient, AuthFailureIsImmediate) {
  testing::MockHttpServer server([](const testing::MockRequest&) { return testing::MockResponse{401, "no"}; });
  HttpChatClient client(fast_config(server.url("/chat")));
  try {
    client.complete("p");
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_EQ(e.status(), 401);
  }
  EXPECT_EQ(server.requests(), 1u);
}

TEST(HttpChatClient, UnreachableEndpointIsTransportError) {
  auto cfg = fast_config("http://127.0.0.1:1/chat");
  cfg.max_retries = 1;
  cfg.timeout_ms = 500;
  HttpChatClient client(cfg);
  EXPECT_THROW(client.complete("p"), TransportError);
}

TEST(Transcript, RecordThenReplayIsIdentical) {
  testing::TempDir dir;
  const auto path = dir / "t.jsonl";
  ScriptedBackend inner({list_of(0, 3), list_of(3, 6)});
  RecordingChatBackend rec(inner, path, "gpt-4o", 1.0);
  DescriptorRequest req;
  req.target_count = 6;
  const auto live = request_descriptors(make_criterion("color"), rec, req);

  const auto records = read_transcript(path);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].model, "gpt-4o");
  EXPECT_EQ(records[0].response, list_of(0, 3));
  EXPECT_FALSE(records[0].timestamp.empty());

  auto replay = ReplayChatBackend::from_file(path);
  EXPECT_EQ(request_descriptors(make_criterion("color"), replay, req), live);
  // All records are consumed now.
  EXPECT_THROW(replay.complete(records[0].prompt), Error);
}

TEST(Transcript, LineRoundTripAndErrors) {
  TranscriptRecord r{"p\n\"q\"", "r", "2024-01-01T00:00:00Z", "m", 0.5};
  const auto back = parse_transcript_line(to_json_line(r));
  EXPECT_EQ(back.prompt, r.prompt);
  EXPECT_EQ(back.temperature, 0.5);
  EXPECT_EQ(to_json_line(r).find('\n'), std::string::npos);
  try {
    parse_transcript_line("{not json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::transcript);
  }
}

class HashEmbedder : public providers::TextEmbedder {
public:
  explicit HashEmbedder(std::size_t dims, std::size_t drop = 0) : dims_(dims), drop_(drop) {}
  EmbeddingMatrix embed(std::span<const std::string> texts) override {
    seen.assign(texts.begin(), texts.end());
    std::vector<std::vector<float>> rows;
    for (std::size_t i = 0; i + drop_ < texts.size(); ++i) rows.push_back(testing::hash_embedding(texts[i], dims_));
    return EmbeddingMatrix::from_rows(rows);
  }
  std::string provider_id() const override { return "hash"; }
  std::vector<std::string> seen;

private:
  std::size_t dims_;
  std::size_t drop_;
};

TEST(BuildBasis, RowsAlignWithDescriptors) {
  HashEmbedder emb(4);
  const auto b = build_basis(make_criterion("color"), {"red", "green", "blue"}, emb);
  EXPECT_EQ(b.vectors().rows(), 3u);
  EXPECT_EQ(b.vectors().dims(), 4u);
  EXPECT_TRUE(b.normalized());
  EXPECT_EQ(b.provider_id(), "hash");
  EXPECT_EQ(emb.seen[1], "Objects with the color of green.");
  for (std::size_t i = 0; i < 3; ++i) {
    const auto raw = testing::hash_embedding(emb.seen[i], 4);
    const auto unit = l2_normalize_rows(EmbeddingMatrix::from_rows({raw})).matrix;
    for (std::size_t d = 0; d < 4; ++d) EXPECT_EQ(b.vectors().at(i, d), unit.at(0, d));
  }
}

TEST(BuildBasis, WrongRowCountIsProviderContract) {
  HashEmbedder emb(4, 1);
  try {
    build_basis(make_criterion("color"), {"red", "green", "blue"}, emb);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::provider_contract);
  }
}

TEST(BuildBasis, FingerprintIsStableAndRecomputable) {
  HashEmbedder emb(4);
  const auto a = build_basis(make_criterion("color"), {"red", "green"}, emb);
  const auto b = build_basis(make_criterion("color"), {"red", "green"}, emb);
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  EXPECT_EQ(a.fingerprint(), basis_fingerprint(make_criterion("color"), {"red", "green"}, "hash"));
  EXPECT_THROW(build_basis(make_criterion("color"), {"red", "Red"}, emb), Error);
}

}  // namespace
}  // namespace crl::basis
