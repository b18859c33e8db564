#include "core/words.hpp"

namespace morsekit {

namespace {

void extend(std::vector<int>& w, int rank, int len,
            std::vector<std::vector<int>>& out) {
  if (static_cast<int>(w.size()) == len) {
    out.push_back(w);
    return;
  }
  for (int l = 0; l < 2 * rank; ++l) {
    if (!w.empty() && l == inverse_letter(w.back())) continue;
    w.push_back(l);
    extend(w, rank, len, out);
    w.pop_back();
  }
}

}  // namespace

std::vector<std::vector<int>> reduced_words(int rank, int len) {
  std::vector<std::vector<int>> out;
  std::vector<int> w;
  extend(w, rank, len, out);
  return out;
}

std::vector<std::vector<int>> reduced_words_up_to(int rank, int max_len) {
  std::vector<std::vector<int>> out;
  for (int len = 1; len <= max_len; ++len) {
    auto words = reduced_words(rank, len);
    out.insert(out.end(), words.begin(), words.end());
  }
  return out;
}

WordStream::WordStream(int rank, int len) : rank_(rank), len_(len) {
  if (rank < 1 || len < 1) done_ = true;
}

bool WordStream::next(std::vector<int>& out) {
  if (done_) return false;
  if (!started_) {
    started_ = true;
    cur_.assign(static_cast<std::size_t>(len_), 0);  // all-zero word is reduced
    out = cur_;
    return true;
  }
  // increment like an odometer, skipping letters that cancel the predecessor
  int pos = len_ - 1;
  while (pos >= 0) {
    const int forbidden = pos > 0 ? inverse_letter(cur_[static_cast<std::size_t>(pos - 1)]) : -1;
    int l = cur_[static_cast<std::size_t>(pos)] + 1;
    while (l < 2 * rank_ && l == forbidden) ++l;
    if (l < 2 * rank_) {
      cur_[static_cast<std::size_t>(pos)] = l;
      // refill the suffix with the smallest valid letters
      for (int p = pos + 1; p < len_; ++p) {
        const int forb = inverse_letter(cur_[static_cast<std::size_t>(p - 1)]);
        cur_[static_cast<std::size_t>(p)] = (forb == 0) ? 1 : 0;
      }
      out = cur_;
      return true;
    }
    --pos;
  }
  done_ = true;
  return false;
}

}  // namespace morsekit
