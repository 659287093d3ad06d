#include "spanprobe/alignment.hpp"

#include "spanprobe/errors.hpp"

namespace spanprobe {

std::vector<PieceAlignment> align(const std::vector<std::string>& words,
                                  const std::vector<Piece>& pieces) {
  const int word_count = static_cast<int>(words.size());
  std::vector<PieceAlignment> alignments;
  alignments.reserve(words.size());

  int previous_word = -1;
  for (std::size_t pos = 0; pos < pieces.size(); ++pos) {
    const int w = pieces[pos].word_index;
    if (w < 0) continue;  // sequence marker
    if (w >= word_count) {
      throw AlignmentError("piece \"" + pieces[pos].token + "\" names word index " +
                           std::to_string(w) + " but only " + std::to_string(word_count) +
                           " words were given");
    }
    if (w < previous_word) {
      throw AlignmentError("piece word indices must be non-decreasing; piece \"" +
                           pieces[pos].token + "\" steps back to word " + std::to_string(w));
    }
    if (w == previous_word) {
      PieceAlignment& current = alignments.back();
      if (current.piece_end != static_cast<int>(pos)) {
        throw AlignmentError("pieces of word \"" + words[static_cast<std::size_t>(w)] +
                             "\" are not contiguous");
      }
      current.piece_end = static_cast<int>(pos) + 1;
    } else {
      alignments.push_back(PieceAlignment{w, static_cast<int>(pos), static_cast<int>(pos) + 1});
      previous_word = w;
    }
  }

  // Every word must own at least one piece.
  std::size_t expected = 0;
  for (const auto& alignment : alignments) {
    if (alignment.word_index != static_cast<int>(expected)) {
      throw AlignmentError("word \"" + words[expected] + "\" maps to no subword piece");
    }
    ++expected;
  }
  if (expected != words.size()) {
    throw AlignmentError("word \"" + words[expected] + "\" maps to no subword piece");
  }
  return alignments;
}

Eigen::VectorXf pool_pieces(const Eigen::Ref<const Eigen::MatrixXf>& piece_vectors) {
  if (piece_vectors.rows() == 0) {
    throw ValidationError("pool_pieces: empty piece sequence");
  }
  return piece_vectors.colwise().mean();
}

}  // namespace spanprobe
