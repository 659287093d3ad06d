#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace spanprobe {

/// One subword piece of the encoder's token sequence. `word_index` is the
/// 0-based source word, or -1 for sequence markers ([CLS]/[SEP] analogues)
/// that belong to no word.
struct Piece {
  std::string token;
  int word_index = -1;
};

/// Contiguous range of piece positions covering one word. Positions index
/// the full token sequence, so ranges sit past any begin-of-sequence
/// marker.
struct PieceAlignment {
  int word_index = 0;
  int piece_begin = 0;  // inclusive
  int piece_end = 0;    // exclusive
};

/// Map each word to the contiguous run of pieces derived from it. Marker
/// pieces are skipped but keep their positions. Throws AlignmentError when
/// a word has no piece, indices are out of range, or runs are not
/// contiguous and non-decreasing.
std::vector<PieceAlignment> align(const std::vector<std::string>& words,
                                  const std::vector<Piece>& pieces);

/// Component-wise arithmetic mean of the rows. Rows are piece vectors;
/// throws ValidationError when the input is empty.
Eigen::VectorXf pool_pieces(const Eigen::Ref<const Eigen::MatrixXf>& piece_vectors);

}  // namespace spanprobe
