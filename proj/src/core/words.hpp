#pragma once

// Reduced words in a free group of rank r over the symmetric alphabet
// 0..2r-1, letter 2i = generator i, letter 2i+1 = its inverse.  Words are
// enumerated in lexicographic letter order so parallel consumers aggregate
// deterministically.

#include <cstdint>
#include <string>
#include <vector>

namespace morsekit {

inline int inverse_letter(int l) { return l ^ 1; }

inline std::string letter_name(int l, int rank) {
  std::string s;
  const char base = rank <= 3 ? "abc"[l / 2] : static_cast<char>('a' + l / 2);
  s += (l % 2) ? static_cast<char>(base - 32) : base;  // 'A' marks the inverse
  return s;
}

inline std::string word_name(const std::vector<int>& w, int rank) {
  std::string s;
  for (int l : w) s += letter_name(l, rank);
  return s.empty() ? "<empty>" : s;
}

// Number of reduced words of exactly length len: (2r)(2r-1)^(len-1).
inline long long reduced_word_count(int rank, int len) {
  if (len == 0) return 1;
  long long c = 2 * rank;
  for (int i = 1; i < len; ++i) {
    c *= 2 * rank - 1;
    if (c > (1ll << 60)) return 1ll << 60;  // saturate
  }
  return c;
}

// All reduced words of exactly the given length, lexicographic.
std::vector<std::vector<int>> reduced_words(int rank, int len);

// All reduced words of length <= max_len (excluding the empty word).
std::vector<std::vector<int>> reduced_words_up_to(int rank, int max_len);

// Lazy lexicographic stream over reduced words of a fixed length.
class WordStream {
 public:
  WordStream(int rank, int len);
  bool next(std::vector<int>& out);  // false when exhausted

 private:
  int rank_, len_;
  std::vector<int> cur_;
  bool started_ = false, done_ = false;
};

}  // namespace morsekit
