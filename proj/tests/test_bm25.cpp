#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "clir/bm25.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using fixtures::doc;
using Tokens = std::vector<std::string>;

namespace {

std::vector<clir::Document> hand_corpus()
{
    return {doc("d1", "the cat sat on the mat"), doc("d2", "the dog sat"), doc("d3", "a cat and a dog and a bird")};
}

}  // namespace

TEST(Bm25Index, SingleDocumentPostings)
{
    std::vector<clir::Document> docs = {doc("d", "a b a")};
    clir::Bm25Index index(docs);
    EXPECT_EQ(index.n_docs(), 1u);
    EXPECT_DOUBLE_EQ(index.avgdl(), 3.0);
    ASSERT_EQ(index.postings("a").size(), 1u);
    EXPECT_EQ(index.postings("a")[0].tf, 2u);
    EXPECT_EQ(index.postings("b")[0].tf, 1u);
    EXPECT_TRUE(index.postings("c").empty());
    EXPECT_EQ(index.vocabulary_size(), 2u);
}

TEST(Bm25Index, AverageLength)
{
    std::vector<clir::Document> docs = {doc("x", "one two"), doc("y", "one two three four")};
    EXPECT_DOUBLE_EQ(clir::Bm25Index(docs).avgdl(), 3.0);
}

TEST(Bm25Index, RejectsBadInput)
{
    std::vector<clir::Document> none;
    EXPECT_THROW(clir::Bm25Index{none}, clir::UsageError);
    std::vector<clir::Document> dup = {doc("x", "a"), doc("x", "b")};
    try {
        clir::Bm25Index index(dup);
        FAIL();
    } catch (const clir::UsageError& e) {
        EXPECT_NE(std::string(e.what()).find("'x'"), std::string::npos);
    }
    std::vector<clir::Document> one = {doc("x", "a")};
    EXPECT_THROW(clir::Bm25Index(one, {-0.1, 0.5}), clir::UsageError);
    EXPECT_THROW(clir::Bm25Index(one, {1.2, 1.5}), clir::UsageError);
}

TEST(Bm25Score, SingleDocumentClosedForm)
{
    std::vector<clir::Document> docs = {doc("d", "x")};
    clir::Bm25Index index(docs, {1.5, 0.75});
    EXPECT_NEAR(index.score(Tokens{"x"}, "d"), 0.28768207245178085, 1e-12);  // ln(4/3)
    EXPECT_NEAR(index.score(Tokens{"x"}, "d"), std::log(4.0 / 3.0), 1e-12);
}

TEST(Bm25Score, IdfOfTermInOneOfTwoDocs) { EXPECT_NEAR(clir::bm25_idf(1, 2), std::log(2.0), 1e-15); }

TEST(Bm25Score, AbsentTermsContributeNothing)
{
    auto docs = hand_corpus();
    clir::Bm25Index index(docs);
    EXPECT_EQ(index.score(Tokens{"zebra", "unicorn"}, "d1"), 0.0);
    EXPECT_EQ(index.score(Tokens{"cat", "zebra"}, "d1"), index.score(Tokens{"cat"}, "d1"));
    EXPECT_THROW(index.score(Tokens{"cat"}, "nope"), clir::UsageError);
}

TEST(Bm25Score, DuplicateQueryTermsCountOnce)
{
    auto docs = hand_corpus();
    clir::Bm25Index index(docs);
    EXPECT_EQ(index.score(Tokens{"cat", "cat", "dog"}, "d3"), index.score(Tokens{"cat", "dog"}, "d3"));
}

// Values computed from the formula by an independent script and frozen.
TEST(Bm25Score, HandCorpusFrozenValues)
{
    auto docs = hand_corpus();
    clir::Bm25Index index(docs);
    Tokens q{"cat", "dog", "the"};
    EXPECT_NEAR(index.score(q, "d1"), 1.1168573524072891, 1e-12);
    EXPECT_NEAR(index.score(q, "d2"), 1.192546521966792, 1e-12);
    EXPECT_NEAR(index.score(q, "d3"), 0.793058232970472, 1e-12);
    EXPECT_NEAR(index.score(Tokens{"a", "bird"}, "d3"), 2.3096406076985256, 1e-12);
}

TEST(Bm25Retrieve, EmptyAndOversizedK)
{
    auto docs = hand_corpus();
    clir::Bm25Index index(docs);
    EXPECT_TRUE(index.retrieve(Tokens{"zebra"}, 2).empty());
    EXPECT_TRUE(index.retrieve(Tokens{}, 2).empty());
    auto all = index.retrieve(Tokens{"sat"}, 10);
    ASSERT_EQ(all.size(), 2u);
    EXPECT_EQ(all[0].doc_id, "d2");
    EXPECT_EQ(all[1].doc_id, "d1");
    EXPECT_THROW(index.retrieve(Tokens{"sat"}, 0), clir::UsageError);
}

TEST(Bm25Retrieve, TwoTermMatchBeatsOneTermMatch)
{
    std::vector<clir::Document> docs = {doc("A", "red apple pie"), doc("B", "red wine bar"), doc("C", "cold ice tea")};
    clir::Bm25Index index(docs);
    Tokens q{"red", "apple"};
    auto hits = index.retrieve(q, 3);
    ASSERT_EQ(hits.size(), 2u);
    EXPECT_EQ(hits[0].doc_id, "A");
    EXPECT_EQ(hits[1].doc_id, "B");

    std::map<std::string, Tokens> corpus = {{"A", {"red", "apple", "pie"}}, {"B", {"red", "wine", "bar"}},
                                            {"C", {"cold", "ice", "tea"}}};
    EXPECT_NEAR(hits[0].score, oracle::bm25(corpus, q, "A"), 1e-12);
    EXPECT_NEAR(hits[1].score, oracle::bm25(corpus, q, "B"), 1e-12);
}

TEST(Bm25Retrieve, TiesBreakByDocId)
{
    std::vector<clir::Document> docs = {doc("zeta", "news today"), doc("alpha", "news today"), doc("mid", "other")};
    clir::Bm25Index index(docs);
    auto hits = index.retrieve(Tokens{"news"}, 2);
    ASSERT_EQ(hits.size(), 2u);
    EXPECT_EQ(hits[0].doc_id, "alpha");
    EXPECT_EQ(hits[1].doc_id, "zeta");
}

namespace {

std::vector<clir::Document> random_corpus(std::mt19937_64& rng, std::size_t n_docs)
{
    static const Tokens vocab = {"a", "b", "c", "d", "e", "f", "g", "h"};
    std::uniform_int_distribution<std::size_t> len(1, 10);
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
    std::vector<clir::Document> docs;
    for (std::size_t i = 0; i < n_docs; ++i) {
        Tokens words(len(rng));
        for (auto& w : words) w = vocab[pick(rng)];
        docs.push_back(doc("doc" + std::to_string(i), clir::join(words, " ")));
    }
    return docs;
}

}  // namespace

TEST(Bm25Properties, RetrieveIsPrefixOfFullRankingAndOrderIndependent)
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        auto docs = random_corpus(rng, 2 + trial % 9);
        clir::Bm25Index index(docs);
        Tokens q = {"a", "c", "h", "c"};
        auto full = index.retrieve(q, docs.size());
        for (std::size_t k = 1; k <= docs.size(); ++k) {
            auto top = index.retrieve(q, k);
            ASSERT_LE(top.size(), k);
            EXPECT_TRUE(std::equal(top.begin(), top.end(), full.begin()));
        }
        for (const auto& hit : full) {
            EXPECT_GT(hit.score, 0.0);
            EXPECT_EQ(hit.score, index.score(q, hit.doc_id));
        }
        for (const auto& d : docs) EXPECT_GE(index.score(q, d.id()), 0.0);

        auto shuffled = docs;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        clir::Bm25Index other(shuffled);
        EXPECT_EQ(other.retrieve(q, 3), index.retrieve(q, 3));
    }
}

TEST(Bm25Properties, IdfDecreasesWithDocumentFrequency)
{
    for (std::size_t n = 1; n <= 200; ++n) {
        for (std::size_t df = 1; df < n; ++df) {
            EXPECT_GT(clir::bm25_idf(df, n), clir::bm25_idf(df + 1, n));
            EXPECT_GT(clir::bm25_idf(df + 1, n), 0.0);
        }
    }
}

TEST(Bm25Properties, TermFrequencyAndLengthEffects)
{
    // Documents of equal length differing only in tf of "t"; then documents
    // with equal tf differing only in length.
    std::vector<clir::Document> by_tf = {doc("tf1", "t x x x"), doc("tf2", "t t x x"), doc("tf3", "t t t x"),
                                         doc("none", "y y y y")};
    clir::Bm25Index tf_index(by_tf);
    EXPECT_LT(tf_index.score(Tokens{"t"}, "tf1"), tf_index.score(Tokens{"t"}, "tf2"));
    EXPECT_LT(tf_index.score(Tokens{"t"}, "tf2"), tf_index.score(Tokens{"t"}, "tf3"));

    std::vector<clir::Document> by_len = {doc("short", "t x"), doc("long", "t x x x x x"), doc("o", "y")};
    clir::Bm25Index index(by_len, {1.2, 0.5});
    EXPECT_GT(index.score(Tokens{"t"}, "short"), index.score(Tokens{"t"}, "long"));
    clir::Bm25Index flat(by_len, {1.2, 0.0});
    EXPECT_EQ(flat.score(Tokens{"t"}, "short"), flat.score(Tokens{"t"}, "long"));
}
