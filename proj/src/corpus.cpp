#include "wordmf/corpus.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

#include "httplib.h"
#include "wordmf/unicode.hpp"

namespace wordmf {

TokenizerConfig default_tokenizer_config() {
  TokenizerConfig cfg;
  cfg.lowercase = true;
  cfg.strip_punctuation = true;
  cfg.keep_internal_apostrophes = true;
  cfg.strip_chapter_heads = true;
  cfg.strip_gutenberg_boilerplate = true;
  cfg.chapter_pattern = "^\\s*CHAPTER";
  return cfg;
}

bool looks_like_url(const std::string& input) {
  return input.rfind("http://", 0) == 0 || input.rfind("https://", 0) == 0;
}

std::string url_cache_key(const std::string& url) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(url.data(), url.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("hashing failure while building cache key");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0x0F]);
  }
  return out;
}

namespace {

std::string stem_of(const std::string& name) {
  const auto slash = name.find_last_of("/\\");
  std::string base = slash == std::string::npos ? name : name.substr(slash + 1);
  const auto dot = base.find_last_of('.');
  if (dot != std::string::npos && dot > 0) base = base.substr(0, dot);
  return base;
}

std::string source_id_for_url(const std::string& url) {
  // scheme://host/path?query -> stem of the last path segment, else the host.
  const auto scheme_end = url.find("://") + 3;
  auto path_start = url.find('/', scheme_end);
  std::string host = url.substr(scheme_end, path_start == std::string::npos
                                                ? std::string::npos
                                                : path_start - scheme_end);
  std::string path = path_start == std::string::npos ? "" : url.substr(path_start);
  const auto q = path.find_first_of("?#");
  if (q != std::string::npos) path = path.substr(0, q);
  std::string stem = stem_of(path);
  if (stem.empty()) stem = host;
  if (stem.empty()) stem = url_cache_key(url).substr(0, 12);
  return stem;
}

std::string read_file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("missing file: " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error("read failure: " + p.string());
  return std::move(ss).str();
}

void check_text(const std::string& bytes, const std::string& origin) {
  if (bytes.empty()) throw Error("empty document: " + origin);
  if (!uni::valid_utf8(bytes)) throw Error("undecodable bytes (not UTF-8): " + origin);
}

std::string drop_bom(std::string text) {
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) text.erase(0, 3);
  return text;
}

std::string fetch_url(const std::string& url) {
  const auto scheme_end = url.find("://") + 3;
  auto path_start = url.find('/', scheme_end);
  std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(origin);
  client.set_follow_location(true);
  client.set_connection_timeout(20, 0);
  client.set_read_timeout(60, 0);
  auto res = client.Get(path);
  if (!res) {
    throw Error("network failure fetching " + url + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error("network failure fetching " + url + ": HTTP " + std::to_string(res->status));
  }
  return res->body;
}

}  // namespace

RawDocument load_document(const std::string& path_or_url, bool fetch_allowed,
                          const std::filesystem::path& cache_dir) {
  if (!looks_like_url(path_or_url)) {
    std::filesystem::path p(path_or_url);
    if (!std::filesystem::exists(p)) throw Error("missing file: " + path_or_url);
    std::string bytes = read_file_bytes(p);
    check_text(bytes, path_or_url);
    return RawDocument{stem_of(p.filename().string()), drop_bom(std::move(bytes))};
  }

  const std::filesystem::path cached = cache_dir / (url_cache_key(path_or_url) + ".txt");
  if (std::filesystem::exists(cached)) {
    std::string bytes = read_file_bytes(cached);
    check_text(bytes, path_or_url + " (cached)");
    return RawDocument{source_id_for_url(path_or_url), drop_bom(std::move(bytes))};
  }
  if (!fetch_allowed) {
    throw Error("fetch disabled: " + path_or_url + " is not in the cache and network use is off");
  }
  std::string bytes = fetch_url(path_or_url);
  check_text(bytes, path_or_url);
  std::filesystem::create_directories(cache_dir);
  // Write via a temp name so a crashed run never leaves a truncated cache entry.
  const std::filesystem::path tmp = cached.string() + ".part";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("cache write failure: " + tmp.string());
  }
  std::filesystem::rename(tmp, cached);
  return RawDocument{source_id_for_url(path_or_url), drop_bom(std::move(bytes))};
}

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto nl = text.find('\n', start);
    if (nl == std::string::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return lines;
}

std::string_view trimmed_view(const std::string& line) {
  std::string_view v(line);
  while (!v.empty() && (v.back() == '\r' || v.back() == ' ' || v.back() == '\t')) {
    v.remove_suffix(1);
  }
  return v;
}

}  // namespace

StripOutcome strip_boilerplate(const RawDocument& doc, const TokenizerConfig& cfg) {
  StripOutcome out;
  out.doc.source_id = doc.source_id;

  std::vector<std::string> lines = split_lines(doc.text);

  if (cfg.strip_gutenberg_boilerplate) {
    static const std::regex start_re("^\\s*\\*\\*\\*\\s*START OF", std::regex::icase);
    static const std::regex end_re("^\\s*\\*\\*\\*\\s*END OF", std::regex::icase);
    std::size_t start = lines.size();
    std::size_t end = lines.size();
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto v = trimmed_view(lines[i]);
      if (std::regex_search(v.begin(), v.end(), start_re)) {
        start = i;
        break;
      }
    }
    if (start < lines.size()) {
      for (std::size_t i = start + 1; i < lines.size(); ++i) {
        const auto v = trimmed_view(lines[i]);
        if (std::regex_search(v.begin(), v.end(), end_re)) {
          end = i;
          break;
        }
      }
    }
    if (start < lines.size() && end < lines.size()) {
      out.gutenberg_markers_found = true;
      lines.assign(lines.begin() + static_cast<std::ptrdiff_t>(start) + 1,
                   lines.begin() + static_cast<std::ptrdiff_t>(end));
    }
  }

  if (cfg.strip_chapter_heads && !cfg.chapter_pattern.empty()) {
    std::regex head_re;
    try {
      head_re = std::regex(cfg.chapter_pattern, std::regex::ECMAScript | std::regex::icase);
    } catch (const std::regex_error& e) {
      throw Error("invalid chapter-heading pattern \"" + cfg.chapter_pattern + "\": " + e.what());
    }
    std::vector<std::string> kept;
    kept.reserve(lines.size());
    for (std::size_t i = 0; i < lines.size(); ++i) {
      const auto v = trimmed_view(lines[i]);
      if (std::regex_search(v.begin(), v.end(), head_re)) {
        // Drop the heading and the title line that follows it.
        ++out.chapter_lines_removed;
        if (i + 1 < lines.size()) {
          ++i;
          ++out.chapter_lines_removed;
        }
        continue;
      }
      kept.push_back(lines[i]);
    }
    lines = std::move(kept);
  }

  std::string joined;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) joined.push_back('\n');
    joined += lines[i];
  }
  out.doc.text = std::move(joined);
  return out;
}

TokenSequence tokenize(const RawDocument& doc, const TokenizerConfig& cfg) {
  TokenSequence seq;
  std::vector<char32_t> word;

  auto flush = [&]() {
    if (word.empty()) return;
    std::size_t first = 0;
    std::size_t last = word.size();
    if (cfg.strip_punctuation) {
      while (first < last && !uni::is_letter(word[first])) ++first;
      while (last > first && !uni::is_letter(word[last - 1])) --last;
    }
    std::string token;
    for (std::size_t k = first; k < last; ++k) {
      char32_t cp = word[k];
      if (!cfg.keep_internal_apostrophes && (cp == 0x27 || cp == 0x2019)) continue;
      if (cfg.lowercase) cp = uni::to_lower(cp);
      uni::append_utf8(token, cp);
    }
    if (!token.empty()) seq.tokens.push_back(std::move(token));
    word.clear();
  };

  std::size_t i = 0;
  const std::string& text = doc.text;
  while (i < text.size()) {
    const char32_t cp = uni::next_codepoint(text, i);
    if (cp == uni::kInvalid) throw Error("undecodable bytes (not UTF-8): " + doc.source_id);
    if (uni::is_space(cp)) {
      flush();
    } else {
      word.push_back(cp);
    }
  }
  flush();

  if (seq.tokens.size() < 2) {
    throw Error("document too short: " + doc.source_id + " has " +
                std::to_string(seq.tokens.size()) + " token(s), need at least 2");
  }
  return seq;
}

namespace {

// Unbiased draw from [0, n) via rejection; mt19937_64 output is fully
// specified by the standard, so shuffles reproduce across platforms.
std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace

TokenSequence shuffle_tokens(const TokenSequence& seq, std::uint64_t seed) {
  TokenSequence out = seq;
  std::mt19937_64 rng(seed);
  for (std::size_t i = out.tokens.size(); i > 1; --i) {
    const std::uint64_t j = bounded_draw(rng, i);
    std::swap(out.tokens[i - 1], out.tokens[j]);
  }
  return out;
}

}  // namespace wordmf
