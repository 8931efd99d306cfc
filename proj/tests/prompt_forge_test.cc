// Copyright 2026 The vlafreeze Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vlafreeze/prompt_forge.h"

#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <thread>

#include "test_support.h"
#include "vlafreeze/llm_http.h"
#include "vlafreeze/tokenizer.h"

namespace vlafreeze {
namespace {

std::string Numbered(const std::vector<std::string>& tasks, int first = 1) {
  std::string out = "Here you go:\n";
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    out += std::to_string(first + static_cast<int>(i)) + ". " +
           ApplyTemplate(tasks[i]) + "\n";
  }
  return out;
}

TEST(TemplateTest, ApplyAndExtractRoundTrip) {
  EXPECT_EQ(ApplyTemplate("  pick up the   cup "),
            "What action should the robot take to pick up the cup?");
  EXPECT_EQ(ExtractTask("what action should the robot take to Open the drawer?"),
            "Open the drawer");
  EXPECT_FALSE(ExtractTask("Open the drawer"));
  EXPECT_FALSE(ExtractTask("What action should the robot take to ?"));
  EXPECT_THROW(ApplyTemplate("   "), Error);
  for (const std::string task : {"open the drawer", "put the bowl on the plate"}) {
    EXPECT_EQ(ExtractTask(ApplyTemplate(task)), task);
  }
}

TEST(CorpusTest, ParseSkipsCommentsAndReducesTemplates) {
  const PromptCorpus c = ParseCorpus(
      "# header\n\nopen the drawer\r\n"
      "What action should the robot take to close the drawer?\n",
      "mine", CorpusSource::kUser);
  EXPECT_EQ(c.entries(), (std::vector<std::string>{"open the drawer", "close the drawer"}));
  EXPECT_TRUE(c.ContainsCaseInsensitive("OPEN THE DRAWER"));
  EXPECT_EQ(ParseCorpus(FormatCorpus(c), "mine", CorpusSource::kUser), c);
}

TEST(CorpusTest, DuplicatesAndEmptiesAreErrorsUnlessDeduplicated) {
  EXPECT_THROW(PromptCorpus("x", {"a b", "A B"}, CorpusSource::kUser), Error);
  EXPECT_THROW(PromptCorpus("x", {}, CorpusSource::kUser), Error);
  EXPECT_THROW(PromptCorpus("x", {"  "}, CorpusSource::kUser), Error);
  const auto d = PromptCorpus::Deduplicated("x", {"a b", " ", "A B", "c"},
                                            CorpusSource::kUser);
  EXPECT_EQ(d.entries(), (std::vector<std::string>{"a b", "c"}));
}

TEST(CorpusTest, ShippedCorporaLoad) {
  std::vector<PromptCorpus> libero;
  for (const char* name : {"libero_10", "libero_goal", "libero_object", "libero_spatial"}) {
    libero.push_back(LoadCorpus(testing::DataDir() / "corpora" / (std::string(name) + ".txt"),
                                CorpusSource::kUser));
    EXPECT_EQ(libero.back().size(), 10u) << name;
  }
  const auto merged = MergeCorpora("libero", libero, CorpusSource::kUser);
  EXPECT_EQ(merged.size(), 40u);
  const auto llm = LoadCorpus(testing::DataDir() / "corpora/llm_generated.txt",
                              CorpusSource::kLlmGenerated);
  EXPECT_GE(llm.size(), 20u);
  for (const auto& e : llm.entries()) EXPECT_FALSE(merged.ContainsCaseInsensitive(e)) << e;
}

TEST(CorpusTest, SampleIsDeterministicSubsetWithoutReplacement) {
  std::vector<std::string> entries;
  for (int i = 0; i < 30; ++i) entries.push_back("task " + std::to_string(i));
  const PromptCorpus c("c", entries, CorpusSource::kUser);
  const auto a = SampleCorpusPrompts(c, 10, 7);
  EXPECT_EQ(a, SampleCorpusPrompts(c, 10, 7));
  EXPECT_NE(a.entries(), SampleCorpusPrompts(c, 10, 8).entries());
  EXPECT_EQ(a.size(), 10u);
  for (const auto& e : a.entries()) EXPECT_TRUE(c.ContainsCaseInsensitive(e));
  EXPECT_EQ(SampleCorpusPrompts(c, 30, 1).size(), 30u);
  EXPECT_THROW(SampleCorpusPrompts(c, 0, 1), Error);
  EXPECT_THROW(SampleCorpusPrompts(c, 31, 1), Error);
}

TEST(CorpusTest, MergeDropsLaterDuplicates) {
  const std::vector<PromptCorpus> parts = {
      PromptCorpus("a", {"x", "y"}, CorpusSource::kUser),
      PromptCorpus("b", {"Y", "z"}, CorpusSource::kUser)};
  EXPECT_EQ(MergeCorpora("m", parts, CorpusSource::kUser).entries(),
            (std::vector<std::string>{"x", "y", "z"}));
}

TEST(CorpusTest, ToPromptsUsesTemplate) {
  PieceTokenizer tok;
  const PromptCorpus c("c", {"open the drawer"}, CorpusSource::kUser);
  const auto prompts = c.ToPrompts(tok, DefaultTemplate());
  ASSERT_EQ(prompts.size(), 1u);
  EXPECT_EQ(prompts[0].text(), ApplyTemplate("open the drawer"));
  EXPECT_EQ(prompts[0].task_words(), (std::vector<std::string>{"open", "the", "drawer"}));
}

TEST(CorpusSourceTest, NamesRoundTrip) {
  for (auto s : {CorpusSource::kLlmGenerated, CorpusSource::kLibero10,
                 CorpusSource::kLiberoGoal, CorpusSource::kLiberoObject,
                 CorpusSource::kLiberoSpatial, CorpusSource::kUser}) {
    EXPECT_EQ(ParseCorpusSource(CorpusSourceName(s)), s);
  }
  EXPECT_FALSE(ParseCorpusSource("nope"));
}

TEST(InstructionTemplateTest, CountIsSubstituted) {
  const std::string sys = ReferenceSystemPrompt(7);
  const std::string user = ReferenceUserPrompt(7);
  EXPECT_NE(sys.find("7"), std::string::npos);
  EXPECT_NE(user.find("7"), std::string::npos);
  EXPECT_EQ(sys.find("{num"), std::string::npos);
  EXPECT_NE(sys.find("What action should the robot take to {prompt}?"),
            std::string::npos);
  const auto req = LlmGenerationRequest::ForCount(7);
  EXPECT_EQ(req.system_prompt, sys);
  EXPECT_EQ(req.user_prompt, user);
  EXPECT_EQ(req.num_prompts, 7);
}

TEST(NumberedListTest, AcceptsTemplateLinesAndRejectsOthers) {
  const auto parsed = ParseNumberedPromptList(
      "Sure!\n"
      "1. What action should the robot take to open the drawer?\n"
      "2) What action should the robot take to pick up the cup?\r\n"
      "3. Grab the cup\n"
      "4. What action should the robot take to pour 2% milk?\n"
      "Thanks.\n");
  EXPECT_EQ(parsed.tasks, (std::vector<std::string>{"open the drawer", "pick up the cup"}));
  EXPECT_EQ(parsed.rejected.size(), 2u);
}

TEST(NumberedListTest, BadNumberingAndNoListAreParseErrors) {
  for (const char* text : {"no list here", "1. a\n3. b\n", "2. x\n"}) {
    try {
      ParseNumberedPromptList(text);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kParse);
    }
  }
}

TEST(GenerateTest, RetriesUntilCountAndRecordsTranscript) {
  ReplayLlmService service({Numbered({"open the drawer", "close the drawer"}),
                            Numbered({"Open the drawer", "pick up the cup", "stack the cups"})});
  GenerationTranscript transcript;
  auto req = LlmGenerationRequest::ForCount(3);
  const PromptCorpus c = GenerateReferencePrompts(service, req, &transcript);
  EXPECT_EQ(c.entries(),
            (std::vector<std::string>{"open the drawer", "close the drawer", "pick up the cup"}));
  EXPECT_EQ(c.source(), CorpusSource::kLlmGenerated);
  ASSERT_EQ(transcript.entries.size(), 2u);
  EXPECT_EQ(transcript.service, "replay");
  EXPECT_EQ(transcript.entries[1].duplicates, (std::vector<std::string>{"Open the drawer"}));
  EXPECT_EQ(transcript.entries[1].accepted, (std::vector<std::string>{"pick up the cup"}));

  const auto back = GenerationTranscript::FromJson(transcript.ToJson());
  EXPECT_EQ(back.ToJson(), transcript.ToJson());
  auto replay = ReplayLlmService::FromTranscript(back);
  EXPECT_EQ(GenerateReferencePrompts(replay, req), c);
}

TEST(GenerateTest, ExhaustionRaisesWithPartial) {
  ReplayLlmService service({Numbered({"a b"}), Numbered({"a b"}), Numbered({"c d"})});
  auto req = LlmGenerationRequest::ForCount(3);
  req.retry_limit = 2;
  try {
    GenerateReferencePrompts(service, req);
    FAIL();
  } catch (const GenerationError& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGeneration);
    EXPECT_EQ(e.partial(), (std::vector<std::string>{"a b", "c d"}));
  }
}

TEST(GenerateTest, ServiceFailureKeepsPartial) {
  ReplayLlmService service({Numbered({"a b"})});  // second call runs dry
  auto req = LlmGenerationRequest::ForCount(2);
  GenerationTranscript transcript;
  try {
    GenerateReferencePrompts(service, req, &transcript);
    FAIL();
  } catch (const GenerationError& e) {
    EXPECT_EQ(e.partial(), (std::vector<std::string>{"a b"}));
  }
  ASSERT_EQ(transcript.entries.size(), 2u);
  EXPECT_FALSE(transcript.entries[1].error.empty());
}

TEST(GenerateTest, SampleTranscriptFixtureReplays) {
  std::ifstream in(testing::DataDir() / "fixtures/llm_transcript_sample.json");
  const std::string json((std::istreambuf_iterator<char>(in)), {});
  auto replay = ReplayLlmService::FromTranscript(GenerationTranscript::FromJson(json));
  const auto c = GenerateReferencePrompts(replay, LlmGenerationRequest::ForCount(5));
  ASSERT_EQ(c.size(), 5u);
  EXPECT_EQ(c.entries()[0], "fill the coffee maker with water");
  EXPECT_EQ(c.entries()[4], "press the power button on the warmer");
}

TEST(GenerateTest, InvalidRequestIsRejected) {
  ReplayLlmService service({});
  auto req = LlmGenerationRequest::ForCount(0);
  EXPECT_THROW(GenerateReferencePrompts(service, req), Error);
}

// A local chat-completions endpoint answering 503 `failures` times first.
class FakeEndpoint {
 public:
  explicit FakeEndpoint(int failures) : failures_(failures) {
    server_.Post("/v1/chat/completions",
                 [this](const httplib::Request& req, httplib::Response& res) {
                   ++hits_;
                   auth_ = req.get_header_value("Authorization");
                   body_ = req.body;
                   if (hits_ <= failures_) {
                     res.status = 503;
                     return;
                   }
                   nlohmann::json doc;
                   doc["choices"] = {{{"message", {{"content", Numbered({"open the drawer"})}}}}};
                   res.set_content(doc.dump(), "application/json");
                 });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }
  std::string url() const {
    return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
  }
  int hits() const { return hits_; }
  const std::string& auth() const { return auth_; }
  const std::string& body() const { return body_; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  int failures_;
  std::atomic<int> hits_{0};
  std::string auth_;
  std::string body_;
};

TEST(HttpLlmTest, RetriesServerErrorsWithBackoffAndSendsBearer) {
  FakeEndpoint endpoint(2);
  ::setenv("VLAFREEZE_TEST_KEY", "sekret", 1);
  HttpLlmOptions options;
  options.endpoint = endpoint.url();
  options.api_key_env = "VLAFREEZE_TEST_KEY";
  options.initial_backoff_seconds = 0.5;
  HttpLlmService service(options);
  std::vector<double> sleeps;
  service.set_sleeper([&](double s) { sleeps.push_back(s); });
  auto req = LlmGenerationRequest::ForCount(1);
  req.scene_description = "a kitchen table";
  const auto c = GenerateReferencePrompts(service, req);
  EXPECT_EQ(c.entries(), (std::vector<std::string>{"open the drawer"}));
  EXPECT_EQ(endpoint.hits(), 3);
  EXPECT_EQ(sleeps, (std::vector<double>{0.5, 1.0}));
  EXPECT_EQ(endpoint.auth(), "Bearer sekret");
  const auto body = nlohmann::json::parse(endpoint.body());
  EXPECT_EQ(body["model"], "o3");
  EXPECT_EQ(body["messages"][0]["role"], "system");
  EXPECT_NE(body["messages"][1]["content"].get<std::string>().find("a kitchen table"),
            std::string::npos);
  ::unsetenv("VLAFREEZE_TEST_KEY");
}

TEST(HttpLlmTest, GivesUpAfterMaxRetries) {
  FakeEndpoint endpoint(10);
  HttpLlmOptions options;
  options.endpoint = endpoint.url();
  options.api_key_env = "VLAFREEZE_TEST_UNSET_KEY";
  options.max_retries = 1;
  HttpLlmService service(options);
  service.set_sleeper([](double) {});
  try {
    service.Complete(LlmGenerationRequest::ForCount(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGeneration);
    EXPECT_NE(std::string(e.what()).find("503"), std::string::npos);
  }
  EXPECT_EQ(endpoint.hits(), 2);
  EXPECT_TRUE(endpoint.auth().empty());
}

TEST(HttpLlmTest, ImagePartIsAttached) {
  HttpLlmOptions options;
  options.endpoint = "http://localhost:1/v1/chat/completions";
  HttpLlmService service(options);
  auto req = LlmGenerationRequest::ForCount(2);
  req.scene_png = std::string("\x89PNG", 4);
  const auto body = nlohmann::json::parse(service.BuildRequestBody(req));
  const auto& parts = body["messages"][1]["content"];
  ASSERT_TRUE(parts.is_array());
  EXPECT_EQ(parts[1]["image_url"]["url"], "data:image/png;base64," + Base64Encode(*req.scene_png));
  EXPECT_EQ(Base64Encode("Man"), "TWFu");
  EXPECT_EQ(Base64Encode("Ma"), "TWE=");
}

}  // namespace
}  // namespace vlafreeze
