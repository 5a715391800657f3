#pragma once
// Reduced words in a finite-rank free group plus the cyclic-word combinatorics
// (rotations, primitive roots, eventually periodic ends) everything else is
// built from.
//
// Letters are nonzero signed bytes: +k is generator k-1, -k its inverse.
// String form: a..z generators, A..Z inverses, so "abAB" is the commutator
// of the first two generators. The empty string is the identity.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace gogb::freegrp {

using Letter = std::int8_t;

inline Letter letter_inv(Letter x) { return static_cast<Letter>(-x); }
inline int gen_of(Letter x) { return (x > 0 ? x : -x) - 1; }
// Letter order a < A < b < B < ...; shortlex uses this.
inline int letter_key(Letter x) { return 2 * gen_of(x) + (x < 0 ? 1 : 0); }

class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> ls);            // must already be reduced
  static Word parse(const std::string& s);          // reduces
  static Word from_raw(const std::vector<Letter>&); // reduces

  std::string str() const;
  int size() const { return static_cast<int>(ls_.size()); }
  bool empty() const { return ls_.empty(); }
  Letter at(int i) const { return ls_[static_cast<size_t>(i)]; }
  Letter front() const { return ls_.front(); }
  Letter back() const { return ls_.back(); }
  const std::vector<Letter>& letters() const { return ls_; }

  Word inverse() const;
  Word subword(int from, int to) const;  // [from, to)
  Word prefix(int n) const { return subword(0, n); }

  bool operator==(const Word& o) const { return ls_ == o.ls_; }
  bool operator!=(const Word& o) const { return ls_ != o.ls_; }

 private:
  std::vector<Letter> ls_;
};

// Reduced concatenation.
Word rconcat(const Word& a, const Word& b);
Word rpow(const Word& w, int n);
bool is_reduced(const std::vector<Letter>& ls);
bool is_cyclically_reduced(const Word& w);

bool shortlex_less(const Word& a, const Word& b);
int common_prefix_len(const Word& a, const Word& b);

// w = conj * core * conj^-1 with core cyclically reduced.
struct CyclicReduction {
  Word core;
  Word conj;
};
CyclicReduction cyclic_reduce(const Word& w);

Word rotate(const Word& w, int j);  // cyclic rotation by j (w cyclically reduced)

// w = conj * root^exponent * conj^-1, root cyclically reduced and primitive.
struct RootData {
  Word root;
  int exponent = 0;  // 0 iff w trivial
  Word conj;
};
RootData primitive_root(const Word& w);

/// Conjugacy test for cyclically reduced words: rotation membership.
bool conjugate_cyclic(const Word& a, const Word& b);
// Conjugacy for arbitrary words.
bool conjugate(const Word& a, const Word& b);

int translation_length(const Word& w);  // cyclic core size

// ---------------------------------------------------------------------------
// Eventually periodic ends u * p^inf of the free group, in canonical form:
// period cyclically reduced and primitive, prefix * period^inf reduced as
// written, and the prefix shortest possible (no rotation absorbs a letter).
// Canonical forms are syntactically comparable.
struct PeriodicEndForm {
  Word prefix;
  Word period;
  bool operator==(const PeriodicEndForm& o) const {
    return prefix == o.prefix && period == o.period;
  }
  bool operator!=(const PeriodicEndForm& o) const { return !(*this == o); }
  std::string str() const {
    return (prefix.empty() ? std::string() : prefix.str()) + "(" + period.str() + ")^inf";
  }
};

// The end u * p^inf for any nontrivial p (p need not be cyclically reduced).
PeriodicEndForm canonical_end(const Word& u, const Word& p);
// First n letters of the end.
Word end_prefix(const PeriodicEndForm& e, int n);
int common_prefix_len(const PeriodicEndForm& a, const PeriodicEndForm& b);

// ---------------------------------------------------------------------------
// Hashing (FNV-1a over letters) for unordered containers.
struct WordHash {
  size_t operator()(const Word& w) const;
};
size_t hash_letters(const std::vector<Letter>& ls, size_t seed);

// All reduced words of length exactly n / at most n, in shortlex order.
std::vector<Word> reduced_words_of_length(int rank, int n);
std::vector<Word> reduced_words_up_to(int rank, int n);

}  // namespace gogb::freegrp
