#include <Eigen/Core>
#include <vector>

#include "doctest.h"
#include "spanprobe/alignment.hpp"
#include "spanprobe/errors.hpp"

using namespace spanprobe;

TEST_SUITE("alignment") {

TEST_CASE("subword pieces map back to their word's contiguous run") {
  const std::vector<std::string> words{"unhappy"};
  const std::vector<Piece> pieces{{"un", 0}, {"##happy", 0}};
  const auto alignments = align(words, pieces);
  REQUIRE(alignments.size() == 1);
  CHECK(alignments[0].word_index == 0);
  CHECK(alignments[0].piece_begin == 0);
  CHECK(alignments[0].piece_end == 2);
}

TEST_CASE("multiple words split unevenly") {
  const std::vector<std::string> words{"ab", "cd"};
  const std::vector<Piece> pieces{{"ab", 0}, {"c", 1}, {"d", 1}};
  const auto alignments = align(words, pieces);
  REQUIRE(alignments.size() == 2);
  CHECK(alignments[0].piece_begin == 0);
  CHECK(alignments[0].piece_end == 1);
  CHECK(alignments[1].piece_begin == 1);
  CHECK(alignments[1].piece_end == 3);
}

TEST_CASE("sequence markers keep their positions but join no word") {
  const std::vector<std::string> words{"ab", "cd"};
  const std::vector<Piece> pieces{
      {"[CLS]", -1}, {"ab", 0}, {"c", 1}, {"d", 1}, {"[SEP]", -1}};
  const auto alignments = align(words, pieces);
  REQUIRE(alignments.size() == 2);
  CHECK(alignments[0].piece_begin == 1);
  CHECK(alignments[0].piece_end == 2);
  CHECK(alignments[1].piece_begin == 2);
  CHECK(alignments[1].piece_end == 4);
}

TEST_CASE("alignment violations are rejected") {
  // A word with no piece at all.
  CHECK_THROWS_AS(align({"ab", "cd"}, {{"ab", 0}}), AlignmentError);
  // Piece pointing past the word list.
  CHECK_THROWS_AS(align({"ab"}, {{"ab", 0}, {"x", 1}}), AlignmentError);
  // Runs out of order: word 1 before word 0.
  CHECK_THROWS_AS(align({"ab", "cd"}, {{"cd", 1}, {"ab", 0}}), AlignmentError);
  // Interleaved runs are not contiguous.
  CHECK_THROWS_AS(align({"ab", "cd"}, {{"a", 0}, {"cd", 1}, {"b", 0}}), AlignmentError);
}

TEST_CASE("pool_pieces averages rows componentwise") {
  Eigen::MatrixXf pieces(2, 2);
  pieces << 1.0f, 3.0f, 3.0f, 5.0f;
  const Eigen::VectorXf pooled = pool_pieces(pieces);
  REQUIRE(pooled.size() == 2);
  CHECK(pooled(0) == doctest::Approx(2.0f));
  CHECK(pooled(1) == doctest::Approx(4.0f));
}

TEST_CASE("pooling a single piece is the identity") {
  Eigen::MatrixXf one(1, 2);
  one << 7.0f, -2.0f;
  const Eigen::VectorXf pooled = pool_pieces(one);
  CHECK(pooled(0) == 7.0f);
  CHECK(pooled(1) == -2.0f);
}

TEST_CASE("pooling nothing is an error") {
  Eigen::MatrixXf empty(0, 4);
  CHECK_THROWS_AS(pool_pieces(empty), ValidationError);
}

}  // TEST_SUITE
