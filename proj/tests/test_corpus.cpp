#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "corpus.hpp"
#include "error.hpp"

using namespace scorelens;
using namespace scorelens::corpus;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path.string();
}

}  // namespace

TEST_CASE("load_corpus parses minimal records") {
  const auto path = write_temp("corpus_min.jsonl", R"({"id":"e1","text":"Hi there. Bye."})"
                                                   "\n");
  const Corpus c = load_corpus(path);
  REQUIRE(c.essays.size() == 1);
  CHECK(c.essays[0].id == "e1");
  CHECK(c.essays[0].sentences.size() == 2);
}

TEST_CASE("load_corpus empty file") {
  const auto path = write_temp("corpus_empty.jsonl", "");
  CHECK(load_corpus(path).essays.empty());
}

TEST_CASE("load_corpus duplicate id") {
  const auto path = write_temp("corpus_dup.jsonl",
                               "{\"id\":\"e1\",\"text\":\"A.\"}\n{\"id\":\"e1\",\"text\":\"B.\"}\n");
  CHECK_THROWS_AS(load_corpus(path), ValidationError);
}

TEST_CASE("load_corpus names the malformed line") {
  const auto path =
      write_temp("corpus_bad.jsonl", "{\"id\":\"e1\",\"text\":\"A.\"}\nnot json\n");
  try {
    load_corpus(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
}

TEST_CASE("gold level consistency is validated") {
  const auto ok = write_temp("corpus_gold_ok.jsonl",
                             R"({"id":"e1","text":"A.","score":4.5,"level":"High"})"
                             "\n");
  CHECK(load_corpus(ok).essays[0].gold->level == scoring::Level::High);
  const auto bad = write_temp("corpus_gold_bad.jsonl",
                              R"({"id":"e1","text":"A.","score":4.5,"level":"Low"})"
                              "\n");
  CHECK_THROWS_AS(load_corpus(bad), ValidationError);
}

TEST_CASE("corpus round-trips through save and load") {
  const auto path = write_temp(
      "corpus_rt.jsonl",
      "{\"id\":\"e1\",\"prompt_id\":\"p1\",\"text\":\"Hi there.\\n\\nBye now.\",\"score\":3.0}\n"
      "{\"id\":\"e2\",\"text\":\"One two three.\",\"level\":\"Low\"}\n");
  const Corpus c1 = load_corpus(path);
  const auto path2 = write_temp("corpus_rt2.jsonl", "");
  save_corpus(c1, path2);
  const Corpus c2 = load_corpus(path2);
  REQUIRE(c1.essays.size() == c2.essays.size());
  for (std::size_t i = 0; i < c1.essays.size(); ++i) {
    const auto& a = c1.essays[i];
    const auto& b = c2.essays[i];
    CHECK(a.id == b.id);
    CHECK(a.text == b.text);
    CHECK(a.prompt_id == b.prompt_id);
    CHECK(a.sentences.size() == b.sentences.size());
    CHECK(a.paragraphs == b.paragraphs);
    for (std::size_t s = 0; s < a.sentences.size(); ++s) {
      REQUIRE(a.sentences[s].tokens.size() == b.sentences[s].tokens.size());
      for (std::size_t t = 0; t < a.sentences[s].tokens.size(); ++t) {
        CHECK(a.sentences[s].tokens[t].surface == b.sentences[s].tokens[t].surface);
        CHECK(a.sentences[s].tokens[t].begin == b.sentences[s].tokens[t].begin);
      }
    }
  }
}

TEST_CASE("paragraph ranges partition the sentence list") {
  const Essay e = make_essay("e", "One. Two.\n\nThree.\n\nFour. Five. Six.");
  std::size_t expected_begin = 0;
  for (const auto& [b, eend] : e.paragraphs) {
    CHECK(b == expected_begin);
    expected_begin = eend;
  }
  CHECK(expected_begin == e.sentences.size());
}

TEST_CASE("stratified_subset exact proportionality") {
  Corpus c;
  for (int i = 0; i < 100; ++i) {
    Essay e = make_essay("e" + std::to_string(i), "Some text.");
    GoldLabel g;
    g.level = i < 50 ? scoring::Level::Low : scoring::Level::High;
    e.gold = g;
    c.essays.push_back(std::move(e));
  }
  const auto sub = stratified_subset(c, 10, gold_stratum, 7);
  REQUIRE(sub.essays.size() == 10);
  int low = 0, high = 0;
  for (const auto& e : sub.essays) {
    if (e.gold->level == scoring::Level::Low) ++low;
    if (e.gold->level == scoring::Level::High) ++high;
  }
  CHECK(low == 5);
  CHECK(high == 5);
}

TEST_CASE("stratified_subset 60/40 split of 10") {
  Corpus c;
  for (int i = 0; i < 100; ++i) {
    Essay e = make_essay("e" + std::to_string(i), "Some text.");
    GoldLabel g;
    g.level = i < 60 ? scoring::Level::Low : scoring::Level::High;
    e.gold = g;
    c.essays.push_back(std::move(e));
  }
  const auto sub = stratified_subset(c, 10, gold_stratum, 7);
  int low = 0;
  for (const auto& e : sub.essays)
    if (e.gold->level == scoring::Level::Low) ++low;
  CHECK(low == 6);
}

TEST_CASE("stratified_subset n == size returns the whole corpus in order") {
  Corpus c;
  for (int i = 0; i < 20; ++i) {
    Essay e = make_essay("e" + std::to_string(i), "Some text.");
    GoldLabel g;
    g.level = i % 2 == 0 ? scoring::Level::Low : scoring::Level::High;
    e.gold = g;
    c.essays.push_back(std::move(e));
  }
  const auto sub = stratified_subset(c, 20, gold_stratum, 99);
  REQUIRE(sub.essays.size() == 20);
  for (std::size_t i = 0; i < 20; ++i) CHECK(sub.essays[i].id == c.essays[i].id);
}

TEST_CASE("stratified_subset is seed-deterministic") {
  Corpus c;
  for (int i = 0; i < 50; ++i) {
    Essay e = make_essay("e" + std::to_string(i), "Some text.");
    GoldLabel g;
    g.level = i % 3 == 0 ? scoring::Level::Low
                         : (i % 3 == 1 ? scoring::Level::Medium : scoring::Level::High);
    e.gold = g;
    c.essays.push_back(std::move(e));
  }
  const auto a = stratified_subset(c, 21, gold_stratum, 1234);
  const auto b = stratified_subset(c, 21, gold_stratum, 1234);
  REQUIRE(a.essays.size() == b.essays.size());
  for (std::size_t i = 0; i < a.essays.size(); ++i) CHECK(a.essays[i].id == b.essays[i].id);
  const auto other = stratified_subset(c, 21, gold_stratum, 1235);
  std::set<std::string> ids_a, ids_other;
  for (const auto& e : a.essays) ids_a.insert(e.id);
  for (const auto& e : other.essays) ids_other.insert(e.id);
  CHECK(ids_a != ids_other);  // different seed, different draw (overwhelmingly)
}

TEST_CASE("stratified_subset rejects missing labels") {
  Corpus c;
  c.essays.push_back(make_essay("e0", "Some text."));
  CHECK_THROWS_AS(stratified_subset(c, 1, gold_stratum, 1), ValidationError);
}

TEST_CASE("attach_conllu positional alignment") {
  const auto corpus_path =
      write_temp("conllu_corpus.jsonl", "{\"id\":\"e1\",\"text\":\"She runs. He walks.\"}\n");
  const Corpus c = load_corpus(corpus_path);
  const auto conllu_path = write_temp(
      "trees.conllu",
      "1\tShe\tshe\tPRON\t_\t_\t2\tnsubj\t_\t_\n"
      "2\truns\trun\tVERB\t_\t_\t0\troot\t_\t_\n"
      "3\t.\t.\tPUNCT\t_\t_\t2\tpunct\t_\t_\n"
      "\n"
      "1\tHe\the\tPRON\t_\t_\t2\tnsubj\t_\t_\n"
      "2\twalks\twalk\tVERB\t_\t_\t0\troot\t_\t_\n"
      "3\t.\t.\tPUNCT\t_\t_\t2\tpunct\t_\t_\n");
  const auto result = attach_conllu(c, conllu_path);
  CHECK(result.unannotated.empty());
  REQUIRE(result.corpus.essays[0].sentences[0].dep.has_value());
  REQUIRE(result.corpus.essays[0].sentences[1].dep.has_value());
  CHECK(result.corpus.essays[0].sentences[0].tokens[1].lemma == "run");
}

TEST_CASE("attach_conllu rejects out-of-range heads") {
  const auto corpus_path =
      write_temp("conllu_corpus2.jsonl", "{\"id\":\"e1\",\"text\":\"She runs.\"}\n");
  const Corpus c = load_corpus(corpus_path);
  const auto conllu_path = write_temp("trees_bad.conllu",
                                      "1\tShe\tshe\tPRON\t_\t_\t9\tnsubj\t_\t_\n"
                                      "2\truns\trun\tVERB\t_\t_\t0\troot\t_\t_\n"
                                      "3\t.\t.\tPUNCT\t_\t_\t2\tpunct\t_\t_\n");
  CHECK_THROWS_AS(attach_conllu(c, conllu_path), ValidationError);
}

TEST_CASE("attach_conllu cycles are rejected") {
  const auto corpus_path =
      write_temp("conllu_corpus3.jsonl", "{\"id\":\"e1\",\"text\":\"She runs fast.\"}\n");
  const Corpus c = load_corpus(corpus_path);
  const auto conllu_path = write_temp("trees_cycle.conllu",
                                      "1\tShe\tshe\tPRON\t_\t_\t2\tnsubj\t_\t_\n"
                                      "2\truns\trun\tVERB\t_\t_\t3\tdep\t_\t_\n"
                                      "3\tfast\tfast\tADV\t_\t_\t2\tadvmod\t_\t_\n"
                                      "4\t.\t.\tPUNCT\t_\t_\t0\troot\t_\t_\n");
  CHECK_THROWS_AS(attach_conllu(c, conllu_path), ValidationError);
}

TEST_CASE("attach_conllu by sent_id covers a subset and reports the rest") {
  const auto corpus_path =
      write_temp("conllu_corpus4.jsonl", "{\"id\":\"e1\",\"text\":\"She runs. He walks.\"}\n");
  const Corpus c = load_corpus(corpus_path);
  const auto conllu_path = write_temp("trees_keyed.conllu",
                                      "# sent_id = e1:1\n"
                                      "1\tHe\the\tPRON\t_\t_\t2\tnsubj\t_\t_\n"
                                      "2\twalks\twalk\tVERB\t_\t_\t0\troot\t_\t_\n"
                                      "3\t.\t.\tPUNCT\t_\t_\t2\tpunct\t_\t_\n");
  const auto result = attach_conllu(c, conllu_path);
  CHECK_FALSE(result.corpus.essays[0].sentences[0].dep.has_value());
  CHECK(result.corpus.essays[0].sentences[1].dep.has_value());
  REQUIRE(result.unannotated.size() == 1);
  CHECK(result.unannotated[0] == "e1:0");
}

TEST_CASE("attach_conllu skips multiword ranges") {
  const auto corpus_path =
      write_temp("conllu_corpus5.jsonl", "{\"id\":\"e1\",\"text\":\"She runs.\"}\n");
  const Corpus c = load_corpus(corpus_path);
  const auto conllu_path = write_temp("trees_mwt.conllu",
                                      "1-2\tSheruns\t_\t_\t_\t_\t_\t_\t_\t_\n"
                                      "1\tShe\tshe\tPRON\t_\t_\t2\tnsubj\t_\t_\n"
                                      "2\truns\trun\tVERB\t_\t_\t0\troot\t_\t_\n"
                                      "3\t.\t.\tPUNCT\t_\t_\t2\tpunct\t_\t_\n");
  const auto result = attach_conllu(c, conllu_path);
  CHECK(result.corpus.essays[0].sentences[0].dep.has_value());
}
