#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "boundseg/corpus_io.hpp"

using namespace boundseg;

namespace {

std::string fixture(const std::string& name) {
  return std::string(TESTS_FIXTURE_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::vector<std::string> toks(std::initializer_list<const char*> ws) {
  return {ws.begin(), ws.end()};
}

}  // namespace

// ---------------------------------------------------------------- spacing

TEST_CASE("infer_spaces applies the side-suppression rules") {
  CHECK(infer_spaces(toks({"hi", ",", "there"})) ==
        std::vector<std::string>{"", " "});
  CHECK(infer_spaces(toks({"(", "hi", ")"})) ==
        std::vector<std::string>{"", ""});
  CHECK(infer_spaces(toks({"\"", "hi", "\""})) ==
        std::vector<std::string>{"", ""});
}

TEST_CASE("straight quotes pair up by per-sentence parity") {
  const auto b =
      infer_spaces(toks({"\"", "a", "\"", "\"", "b", "\""}));
  CHECK(b == std::vector<std::string>{"", "", " ", "", ""});
  // parity restarts with every call, so a fresh sentence opens again
  const auto again = infer_spaces(toks({"'", "x", "'"}));
  CHECK(again == std::vector<std::string>{"", ""});
  CHECK(infer_spaces(toks({"'", "x", "'"})) == again);
}

TEST_CASE("curly and angled quotes are pre-paired") {
  CHECK(infer_spaces(toks({"“", "hi", "”"})) ==
        std::vector<std::string>{"", ""});
  CHECK(infer_spaces(toks({"«", "hi", "»"})) ==
        std::vector<std::string>{"", ""});
}

TEST_CASE("multi-character punctuation classifies by first codepoint") {
  // "..." suppresses to its left like a period does
  CHECK(infer_spaces(toks({"wait", "..."})) == std::vector<std::string>{""});
  // tokens with any non-punctuation character are ordinary words
  CHECK(infer_spaces(toks({"her", "07'"})) == std::vector<std::string>{" "});
}

TEST_CASE("infer_spaces output length matches the token count") {
  CHECK(infer_spaces(toks({"one"})).empty());
  const auto mixed =
      toks({"(", "a", ",", "b", ")", ".", "\"", "c", "\"", "word"});
  const auto b = infer_spaces(mixed);
  REQUIRE(b.size() == mixed.size() - 1);
  for (const auto& s : b) CHECK((s == "" || s == " "));
}

// ------------------------------------------------------------------ DIMSUM

TEST_CASE("golden nine-column file parses into annotated sentences") {
  std::istringstream in(slurp(fixture("golden.dimsum")));
  const auto sents = read_dimsum(in, "golden.dimsum");
  REQUIRE(sents.size() == 3);

  const AnnotatedSentence& s1 = sents[0];
  CHECK(s1.id == "ex.1");
  REQUIRE(s1.tokens.size() == 15);
  CHECK(s1.tokens[0].surface == "My");
  CHECK(s1.tokens[0].lemma == "my");
  CHECK(s1.tokens[0].pos == "PRP$");
  CHECK(s1.tokens[3].supersense == "v.motion");
  CHECK(s1.tokens[8].strength == "_");

  REQUIRE(s1.mwes.size() == 3);
  CHECK(s1.mwes[0].indices == std::vector<std::size_t>{3, 8});
  CHECK(s1.mwes[1].indices == std::vector<std::size_t>{5, 6, 7});
  CHECK(s1.mwes[2].indices == std::vector<std::size_t>{12, 13});

  // space everywhere except before the final period
  REQUIRE(s1.boundaries.size() == 14);
  for (std::size_t i = 0; i + 1 < s1.boundaries.size(); ++i)
    CHECK(s1.boundaries[i] == " ");
  CHECK(s1.boundaries.back() == "");

  CHECK(sents[1].id == "ex.2");
  REQUIRE(sents[1].mwes.size() == 1);
  CHECK(sents[1].mwes[0].indices == std::vector<std::size_t>{3, 4});
  CHECK(sents[2].mwes.empty());
}

TEST_CASE("golden nine-column file round-trips byte for byte") {
  const std::string bytes = slurp(fixture("golden.dimsum"));
  std::istringstream in(bytes);
  const auto sents = read_dimsum(in, "golden.dimsum");
  std::ostringstream out;
  write_dimsum(out, sents);
  CHECK(out.str() == bytes);

  // and the writer's output is a fixed point
  std::istringstream in2(out.str());
  std::ostringstream out2;
  write_dimsum(out2, read_dimsum(in2, "round2"));
  CHECK(out2.str() == out.str());
}

TEST_CASE("writer encodes a gappy span as B o I") {
  AnnotatedSentence sent;
  sent.id = "g";
  for (const char* w : {"a", "b", "c"})
    sent.tokens.push_back(Token{w, "", "", "", "", ""});
  sent.boundaries = {" ", " "};
  sent.mwes.push_back({{0, 2}, ""});
  std::ostringstream out;
  write_dimsum(out, {sent});
  CHECK(out.str() ==
        "1\ta\t\t\tB\t0\t\t\t\n"
        "2\tb\t\t\to\t0\t\t\t\n"
        "3\tc\t\t\tI\t1\t_\t\t\n"
        "\n");
}

TEST_CASE("nine-column reader rejects malformed rows") {
  auto reject = [](const char* body, const char* why) {
    INFO(why);
    std::istringstream in(body);
    CHECK_THROWS_AS(read_dimsum(in, "bad"), ParseError);
  };
  reject("1\ta\ta\tX\tO\t0\t\t\n", "eight columns");
  reject("2\ta\ta\tX\tO\t0\t\t\tid\n", "offset must start at 1");
  reject("1\ta\ta\tX\tQ\t0\t\t\tid\n", "unknown tag letter");
  reject("1\ta\ta\tX\tI\t0\t\t\tid\n", "continuation without parent");
  reject("1\ta\ta\tX\tO\t0\t\t\tid\n2\tb\tb\tX\tI\t1\t\t\tid\n",
         "parent is not an MWE token");
  reject("1\ta\ta\tX\tB\t0\t\t\tid\n2\tb\tb\tX\ti\t1\t\t\tid\n",
         "case mismatch against parent chain");
  reject("1\ta\ta\tX\tO\t3\t\t\tid\n", "outside tags cannot take parents");
  reject("1\ta\ta\tX\tb\t0\t\t\tid\n2\tb\tb\tX\ti\t1\t\t\tid\n",
         "lowercase span outside any gap");
  reject("1\t__GAP__\tg\tX\tO\t0\t\t\tid\n", "reserved gap marker as surface");
}

TEST_CASE("parse errors carry source and line number") {
  std::istringstream in("1\ta\ta\tX\tO\t0\t\t\tid\n2\tb\tb\tX\tQ\t0\t\t\tid\n");
  try {
    read_dimsum(in, "corpus.tsv");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.source() == "corpus.tsv");
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).rfind("corpus.tsv:2: ", 0) == 0);
  }
}

TEST_CASE("writer rejects span shapes the tagging cannot express") {
  auto sent_with = [](std::vector<MweSpan> spans) {
    AnnotatedSentence sent;
    sent.id = "x";
    for (const char* w : {"a", "b", "c", "d", "e", "f"})
      sent.tokens.push_back(Token{w, "", "", "", "", ""});
    sent.boundaries.assign(5, " ");
    sent.mwes = std::move(spans);
    return sent;
  };
  std::ostringstream out;
  // shared token
  CHECK_THROWS_AS(write_dimsum(out, {sent_with({{{0, 1}, ""}, {{1, 2}, ""}})}),
                  Error);
  // interleaved, neither inside the other's gap
  CHECK_THROWS_AS(
      write_dimsum(out, {sent_with({{{0, 2, 4}, ""}, {{1, 5}, ""}})}), Error);
  // two levels of nesting
  CHECK_THROWS_AS(
      write_dimsum(out,
                   {sent_with({{{0, 5}, ""}, {{1, 4}, ""}, {{2, 3}, ""}})}),
      Error);
  // one nesting level is fine
  CHECK_NOTHROW(write_dimsum(out, {sent_with({{{0, 5}, ""}, {{1, 2}, ""}})}));
}

// ----------------------------------------------------------------- PARSEME

TEST_CASE("indexed-MWE file parses spans, flags and optional POS") {
  std::istringstream in(slurp(fixture("golden.parsemetsv")));
  const auto sents = read_parseme(in, "golden.parsemetsv");
  REQUIRE(sents.size() == 3);

  const AnnotatedSentence& s1 = sents[0];
  CHECK(s1.id == "golden.parsemetsv:1");
  REQUIRE(s1.tokens.size() == 5);
  REQUIRE(s1.mwes.size() == 2);
  CHECK(s1.mwes[0].indices == std::vector<std::size_t>{0, 2});
  CHECK(s1.mwes[0].category == "ID");
  CHECK(s1.mwes[1].indices == std::vector<std::size_t>{1, 2});
  CHECK(s1.mwes[1].category == "LVC");
  CHECK(s1.boundaries == std::vector<std::string>{" ", " ", " ", ""});
  CHECK(s1.tokens[0].pos.empty());

  const AnnotatedSentence& s2 = sents[1];
  REQUIRE(s2.mwes.size() == 1);
  CHECK(s2.mwes[0].indices == std::vector<std::size_t>{1, 3});
  CHECK(s2.mwes[0].category == "LVC");
  CHECK(s2.tokens[0].pos == "PRON");
  CHECK(s2.tokens[4].pos == "PUNCT");

  CHECK(sents[2].mwes.empty());
}

TEST_CASE("indexed-MWE file round-trips byte for byte") {
  const std::string bytes = slurp(fixture("golden.parsemetsv"));
  std::istringstream in(bytes);
  const auto sents = read_parseme(in, "golden.parsemetsv");
  std::ostringstream out;
  write_parseme(out, sents);
  CHECK(out.str() == bytes);
}

TEST_CASE("writer renumbers spans by first token and defaults the category") {
  AnnotatedSentence sent;
  sent.id = "r";
  for (const char* w : {"a", "b", "c", "d"})
    sent.tokens.push_back(Token{w, "", "", "", "", ""});
  sent.boundaries.assign(3, " ");
  // stored out of order and without categories
  sent.mwes.push_back({{2, 3}, ""});
  sent.mwes.push_back({{0, 1}, ""});
  std::ostringstream out;
  write_parseme(out, {sent});
  CHECK(out.str() ==
        "1\ta\t_\t1:MWE\n"
        "2\tb\t_\t1\n"
        "3\tc\t_\t2:MWE\n"
        "4\td\t_\t2\n"
        "\n");
}

TEST_CASE("indexed-MWE reader rejects malformed input") {
  auto reject = [](const char* body, const char* why) {
    INFO(why);
    std::istringstream in(body);
    CHECK_THROWS_AS(read_parseme(in, "bad"), ParseError);
  };
  reject("1\ta\t_\n", "three columns");
  reject("3\ta\t_\t_\n", "rank must start at 1");
  reject("1\ta\tmaybe\t_\n", "no-space flag must be nsp or _");
  reject("1\ta\t_\t1:ID\n2\tb\t_\t1:ID\n", "same index introduced twice");
  reject("1\ta\t_\t1\n", "bare index before its introduction");
  reject("1\ta\t_\tx:ID\n", "non-numeric index");
  reject("1\ta\t_\t0:ID\n", "index zero is reserved");
  reject("1\t__GAP__\t_\t_\n", "reserved gap marker as surface");
}

// ------------------------------------------------------------ companion POS

TEST_CASE("companion POS blocks attach by position") {
  std::istringstream raw("a b c\nd e\n");
  auto sents = read_raw(raw, "raw.txt");
  REQUIRE(sents.size() == 2);
  CHECK(sents[0].id == "raw.txt:1");

  std::istringstream pos(
      "# newdoc\n"
      "1\tDET\n"
      "2-3\tskipped\trange\n"
      "2\tNOUN\n"
      "3\tc\tc\tVERB\t_\n"
      "\n"
      "1\tX\n"
      "2\tY\n");
  attach_pos(sents, pos, "pos.conllu");
  CHECK(sents[0].tokens[0].pos == "DET");
  CHECK(sents[0].tokens[1].pos == "NOUN");
  CHECK(sents[0].tokens[2].pos == "VERB");
  CHECK(sents[1].tokens[1].pos == "Y");
}

TEST_CASE("companion POS data must align with the corpus") {
  std::istringstream raw("a b\n");
  auto sents = read_raw(raw);
  std::istringstream extra_block("1\tX\n2\tY\n\n1\tZ\n");
  CHECK_THROWS_AS(attach_pos(sents, extra_block), MismatchError);

  std::istringstream raw2("a b\nc d\n");
  auto sents2 = read_raw(raw2);
  std::istringstream missing_block("1\tX\n2\tY\n");
  CHECK_THROWS_AS(attach_pos(sents2, missing_block), MismatchError);

  std::istringstream raw3("a b\n");
  auto sents3 = read_raw(raw3);
  std::istringstream short_block("1\tX\n");
  CHECK_THROWS_AS(attach_pos(sents3, short_block), MismatchError);
}

// ----------------------------------------------------------------- support

TEST_CASE("support lexicon lines split into forms") {
  std::istringstream in(slurp(fixture("support.lexicon")));
  const auto forms = read_support_lexicon(in, "support.lexicon");
  REQUIRE(forms.size() == 4);
  CHECK(forms[0] == toks({"oil", "change"}));
  CHECK(forms[3] == toks({"ice", "cream", "cone"}));
}

TEST_CASE("support context markup yields sentences with spans") {
  std::istringstream in(slurp(fixture("support.context")));
  const auto sents = read_support_context(in, "support.context");
  REQUIRE(sents.size() == 3);
  CHECK(sents[0].surfaces() ==
        toks({"Get", "a", "routine", "oil", "change", "today", "!"}));
  REQUIRE(sents[0].mwes.size() == 1);
  CHECK(sents[0].mwes[0].indices == std::vector<std::size_t>{3, 4});
  // boundaries get the usual inference, so "today !" glues to the left
  CHECK(sents[0].boundaries.back() == "");
  CHECK(sents[1].mwes[0].indices == std::vector<std::size_t>{2, 3});
}

TEST_CASE("support context markup is validated") {
  auto reject = [](const char* body, const char* why) {
    INFO(why);
    std::istringstream in(body);
    CHECK_THROWS_AS(read_support_context(in, "bad"), ParseError);
  };
  reject("a [[b [[c]] d\n", "nested opening");
  reject("a [[b c\n", "never closed");
  reject("a b]] c\n", "never opened");
  reject("a[[b c]]\n", "marker stuck inside a token");
  reject("a [[]] b\n", "empty span");
}

TEST_CASE("raw reader splits on whitespace and spaces every boundary") {
  std::istringstream in("Hello there !\n\n  spaced\tout  \n");
  const auto sents = read_raw(in, "r");
  REQUIRE(sents.size() == 2);
  CHECK(sents[0].surfaces() == toks({"Hello", "there", "!"}));
  CHECK(sents[0].boundaries == std::vector<std::string>{" ", " "});
  CHECK(sents[1].surfaces() == toks({"spaced", "out"}));
  CHECK(sents[1].id == "r:3");

  std::istringstream gap("a __GAP__ b\n");
  CHECK_THROWS_AS(read_raw(gap), ParseError);
}
