#pragma once

// Text normalization, tokenization and phrase extraction shared by the
// record store (title matching) and cluster labeling (phrase candidates).

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <openssl/evp.h>
#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "citecascade/error.hpp"

namespace citecascade::text {

// Lowercase, NFC, punctuation stripped, whitespace collapsed and trimmed.
inline std::string normalize_title(std::string_view raw) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  icu::UnicodeString in = icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
  icu::UnicodeString composed = U_SUCCESS(status) ? nfc->normalize(in, status) : in;
  if (U_FAILURE(status)) composed = in;
  composed.toLower(icu::Locale::getRoot());

  icu::UnicodeString out;
  bool pending_space = false;
  for (int32_t i = 0; i < composed.length();) {
    UChar32 c = composed.char32At(i);
    i += U16_LENGTH(c);
    if (u_isUWhiteSpace(c)) {
      pending_space = !out.isEmpty();
      continue;
    }
    if (u_ispunct(c)) continue;
    if (pending_space) out.append(static_cast<UChar>(' '));
    pending_space = false;
    out.append(c);
  }
  std::string result;
  out.toUTF8String(result);
  return result;
}

inline std::string sha1_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha1(), nullptr) != 1) {
    fail(ErrorKind::io, "sha1 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(length * 2);
  for (unsigned int i = 0; i < length; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0x0f]);
  }
  return out;
}

// Stopword list, version 1. data/stopwords-v1.txt carries the same words.
inline const std::unordered_set<std::string>& default_stopwords() {
  static const std::unordered_set<std::string> words = {
      "a",       "about",   "above",  "across",   "after",   "against", "all",
      "also",    "among",   "an",     "and",      "any",     "are",     "as",
      "at",      "be",      "been",   "before",   "being",   "between", "both",
      "but",     "by",      "can",    "could",    "did",     "do",      "does",
      "during",  "each",    "either", "for",      "from",    "had",     "has",
      "have",    "how",     "however", "i",       "if",      "in",      "into",
      "is",      "it",      "its",    "more",     "most",    "new",     "no",
      "nor",     "not",     "of",     "on",       "or",      "other",   "our",
      "over",    "should",  "so",     "some",     "such",    "than",    "that",
      "the",     "their",   "them",   "then",     "there",   "these",   "they",
      "this",    "those",   "through", "to",      "toward",  "towards", "under",
      "upon",    "us",      "using",  "via",      "was",     "we",      "were",
      "what",    "when",    "where",  "whether",  "which",   "while",   "who",
      "why",     "will",    "with",   "within",   "without", "would",   "you",
  };
  return words;
}

inline std::unordered_set<std::string> load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot read stopword file: " + path);
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.pop_back();
    if (!line.empty()) words.insert(line);
  }
  return words;
}

// Lowercased word tokens; any non-alphanumeric byte (ASCII) separates tokens.
// Non-ASCII bytes are kept inside tokens.
inline std::vector<std::string> tokenize(std::string_view raw) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : raw) {
    auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80 || std::isalnum(c)) {
      current.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

// Contiguous runs of non-stopword tokens, split at stopwords, then every
// n-gram of length [min_len, max_len] inside each run. Returned distinct and
// sorted so per-document counting is presence-based.
inline std::vector<std::string> phrases(std::string_view raw, std::size_t min_len,
                                        std::size_t max_len,
                                        const std::unordered_set<std::string>& stopwords) {
  std::set<std::string> out;
  std::vector<std::string> run;
  auto flush = [&] {
    for (std::size_t start = 0; start < run.size(); ++start) {
      std::string phrase;
      for (std::size_t len = 1; len <= max_len && start + len <= run.size(); ++len) {
        if (len > 1) phrase.push_back(' ');
        phrase += run[start + len - 1];
        if (len >= min_len) out.insert(phrase);
      }
    }
    run.clear();
  };
  for (auto& token : tokenize(raw)) {
    bool numeric = std::all_of(token.begin(), token.end(),
                               [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
    if (stopwords.count(token) || numeric) {
      flush();
    } else {
      run.push_back(std::move(token));
    }
  }
  flush();
  return {out.begin(), out.end()};
}

inline std::vector<std::string> split_words(const std::string& phrase) {
  std::vector<std::string> words;
  std::string current;
  for (char c : phrase) {
    if (c == ' ') {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

}  // namespace citecascade::text
