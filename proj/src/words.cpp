#include "gogb/words.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace gogb::freegrp {

Word::Word(std::vector<Letter> ls) : ls_(std::move(ls)) {
  assert(is_reduced(ls_));
}

Word Word::parse(const std::string& s) {
  std::vector<Letter> ls;
  ls.reserve(s.size());
  for (char c : s) {
    if (c >= 'a' && c <= 'z')
      ls.push_back(static_cast<Letter>(c - 'a' + 1));
    else if (c >= 'A' && c <= 'Z')
      ls.push_back(static_cast<Letter>(-(c - 'A' + 1)));
    else if (c == ' ' || c == '1')  // allow "1" as the identity
      continue;
    else
      throw std::runtime_error("bad letter in word: " + s);
  }
  return from_raw(ls);
}

Word Word::from_raw(const std::vector<Letter>& raw) {
  std::vector<Letter> out;
  out.reserve(raw.size());
  for (Letter x : raw) {
    if (x == 0) throw std::runtime_error("zero letter");
    if (!out.empty() && out.back() == letter_inv(x))
      out.pop_back();
    else
      out.push_back(x);
  }
  return Word(std::move(out));
}

std::string Word::str() const {
  if (ls_.empty()) return "1";
  std::string s;
  s.reserve(ls_.size());
  for (Letter x : ls_)
    s.push_back(x > 0 ? static_cast<char>('a' + x - 1)
                      : static_cast<char>('A' - x - 1));
  return s;
}

Word Word::inverse() const {
  std::vector<Letter> out(ls_.rbegin(), ls_.rend());
  for (Letter& x : out) x = letter_inv(x);
  return Word(std::move(out));
}

Word Word::subword(int from, int to) const {
  assert(0 <= from && from <= to && to <= size());
  return Word(std::vector<Letter>(ls_.begin() + from, ls_.begin() + to));
}

bool is_reduced(const std::vector<Letter>& ls) {
  for (size_t i = 1; i < ls.size(); ++i)
    if (ls[i] == letter_inv(ls[i - 1])) return false;
  return true;
}

Word rconcat(const Word& a, const Word& b) {
  int cancel = 0;
  int m = std::min(a.size(), b.size());
  while (cancel < m && a.at(a.size() - 1 - cancel) == letter_inv(b.at(cancel)))
    ++cancel;
  std::vector<Letter> out;
  out.reserve(static_cast<size_t>(a.size() + b.size() - 2 * cancel));
  for (int i = 0; i < a.size() - cancel; ++i) out.push_back(a.at(i));
  for (int i = cancel; i < b.size(); ++i) out.push_back(b.at(i));
  return Word(std::move(out));
}

Word rpow(const Word& w, int n) {
  if (n == 0) return Word();
  Word base = n > 0 ? w : w.inverse();
  int k = n > 0 ? n : -n;
  Word acc;
  for (int i = 0; i < k; ++i) acc = rconcat(acc, base);
  return acc;
}

bool is_cyclically_reduced(const Word& w) {
  if (w.size() <= 1) return true;
  return w.front() != letter_inv(w.back());
}

bool shortlex_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (int i = 0; i < a.size(); ++i) {
    int ka = letter_key(a.at(i)), kb = letter_key(b.at(i));
    if (ka != kb) return ka < kb;
  }
  return false;
}

int common_prefix_len(const Word& a, const Word& b) {
  int m = std::min(a.size(), b.size());
  int i = 0;
  while (i < m && a.at(i) == b.at(i)) ++i;
  return i;
}

CyclicReduction cyclic_reduce(const Word& w) {
  int lo = 0, hi = w.size();
  while (hi - lo >= 2 && w.at(lo) == letter_inv(w.at(hi - 1))) {
    ++lo;
    --hi;
  }
  return {w.subword(lo, hi), w.prefix(lo)};
}

Word rotate(const Word& w, int j) {
  assert(is_cyclically_reduced(w));
  if (w.empty()) return w;
  j = ((j % w.size()) + w.size()) % w.size();
  std::vector<Letter> out;
  out.reserve(static_cast<size_t>(w.size()));
  for (int i = 0; i < w.size(); ++i) out.push_back(w.at((i + j) % w.size()));
  return Word(std::move(out));
}

RootData primitive_root(const Word& w) {
  CyclicReduction cr = cyclic_reduce(w);
  if (cr.core.empty()) return {Word(), 0, cr.conj};
  int L = cr.core.size();
  for (int d = 1; d <= L; ++d) {
    if (L % d != 0) continue;
    bool periodic = true;
    for (int i = d; i < L && periodic; ++i)
      periodic = cr.core.at(i) == cr.core.at(i - d);
    if (periodic) return {cr.core.prefix(d), L / d, cr.conj};
  }
  return {cr.core, 1, cr.conj};  // unreachable: d == L always periodic
}

bool conjugate_cyclic(const Word& a, const Word& b) {
  if (a.size() != b.size()) return false;
  for (int j = 0; j < std::max(1, a.size()); ++j)
    if (rotate(a, j) == b) return true;
  return a == b;
}

bool conjugate(const Word& a, const Word& b) {
  return conjugate_cyclic(cyclic_reduce(a).core, cyclic_reduce(b).core);
}

int translation_length(const Word& w) { return cyclic_reduce(w).core.size(); }

PeriodicEndForm canonical_end(const Word& u, const Word& p) {
  CyclicReduction cr = cyclic_reduce(p);
  if (cr.core.empty()) throw std::runtime_error("periodic end needs a nontrivial period");
  Word r = primitive_root(cr.core).root;
  Word head = rconcat(u, cr.conj);
  // head * r^inf; expand far enough that the tail is visibly periodic.
  int L = r.size();
  int reps = (head.size() + 2 * L + 4) / L + 2;
  Word e = rconcat(head, rpow(r, reps));
  // e is a genuine prefix of the end and long enough: |e| >= |head| + 2L.
  int k = e.size() - L;
  while (k > 0 && e.at(k - 1) == e.at(k - 1 + L)) --k;
  PeriodicEndForm out{e.prefix(k), e.subword(k, k + L)};
  assert(is_cyclically_reduced(out.period));
  return out;
}

Word end_prefix(const PeriodicEndForm& e, int n) {
  std::vector<Letter> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < std::min(n, e.prefix.size()); ++i) out.push_back(e.prefix.at(i));
  int i = static_cast<int>(out.size());
  while (i < n) {
    out.push_back(e.period.at((i - e.prefix.size()) % e.period.size()));
    ++i;
  }
  return Word(std::move(out));  // reduced: prefix*period^inf is reduced as written
}

int common_prefix_len(const PeriodicEndForm& a, const PeriodicEndForm& b) {
  if (a == b) return 1 << 20;  // equal ends: effectively infinite agreement
  int n = std::max(a.prefix.size(), b.prefix.size()) +
          2 * (a.period.size() + b.period.size()) + 4;
  return common_prefix_len(end_prefix(a, n), end_prefix(b, n));
}

size_t hash_letters(const std::vector<Letter>& ls, size_t seed) {
  size_t h = seed ^ 1469598103934665603ull;
  for (Letter x : ls) {
    h ^= static_cast<size_t>(static_cast<unsigned char>(x));
    h *= 1099511628211ull;
  }
  return h;
}

size_t WordHash::operator()(const Word& w) const { return hash_letters(w.letters(), 0); }

static void extend_words(int rank, int n, std::vector<Letter>& cur,
                         std::vector<Word>& out) {
  if (static_cast<int>(cur.size()) == n) {
    out.push_back(Word(cur));
    return;
  }
  // letters in shortlex order: a, A, b, B, ...
  for (int g = 0; g < rank; ++g) {
    for (int sgn = 0; sgn < 2; ++sgn) {
      Letter x = static_cast<Letter>(sgn == 0 ? g + 1 : -(g + 1));
      if (!cur.empty() && cur.back() == letter_inv(x)) continue;
      cur.push_back(x);
      extend_words(rank, n, cur, out);
      cur.pop_back();
    }
  }
}

std::vector<Word> reduced_words_of_length(int rank, int n) {
  std::vector<Word> out;
  std::vector<Letter> cur;
  extend_words(rank, n, cur, out);
  return out;
}

std::vector<Word> reduced_words_up_to(int rank, int n) {
  std::vector<Word> out;
  for (int k = 0; k <= n; ++k) {
    auto part = reduced_words_of_length(rank, k);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace gogb::freegrp
