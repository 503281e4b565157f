#include "signcurator/metrics/text_metrics.hpp"

#include "signcurator/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string_view>

namespace signcurator::metrics {

std::string to_string(CorpusMetric metric) {
  switch (metric) {
    case CorpusMetric::Bleu: return "bleu";
    case CorpusMetric::ChrF: return "chrf";
    case CorpusMetric::External: return "external";
  }
  throw Error("unhandled corpus metric value");
}

namespace {

bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }

// Symbol classes padded unconditionally by the 13a rules. '.' and ','
// (0x2E, 0x2C) are excluded here: they pad only next to a non-digit.
bool is_13a_symbol(char c) {
  const unsigned char u = static_cast<unsigned char>(c);
  return (u >= 0x20 && u <= 0x26) || (u >= 0x28 && u <= 0x2B) || u == 0x2F ||
         (u >= 0x3A && u <= 0x40) || (u >= 0x5B && u <= 0x60) ||
         (u >= 0x7B && u <= 0x7E);
}

std::string replace_all(std::string text, std::string_view needle,
                        std::string_view replacement) {
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    text.replace(pos, needle.size(), replacement);
    pos += replacement.size();
  }
  return text;
}

}  // namespace

std::vector<std::string> tokenize_13a(const std::string& text) {
  std::string norm = replace_all(text, "-\n", "");
  norm = replace_all(std::move(norm), "\n", " ");
  norm = replace_all(std::move(norm), "&quot;", "\"");
  norm = replace_all(std::move(norm), "&amp;", "&");
  norm = replace_all(std::move(norm), "&lt;", "<");
  norm = replace_all(std::move(norm), "&gt;", ">");

  std::string padded;
  padded.reserve(norm.size() * 2);
  for (std::size_t i = 0; i < norm.size(); ++i) {
    const char c = norm[i];
    bool pad = false;
    if (is_13a_symbol(c)) {
      pad = true;
    } else if (c == '.' || c == ',') {
      // Padded only when an adjacent character exists and is a non-digit;
      // at a string edge the missing neighbor does not trigger padding, so
      // "3.5", "5." and ".5" all stay joined.
      const bool prev_non_digit = i > 0 && !is_ascii_digit(norm[i - 1]);
      const bool next_non_digit =
          i + 1 < norm.size() && !is_ascii_digit(norm[i + 1]);
      pad = prev_non_digit || next_non_digit;
    }
    if (pad) {
      padded += ' ';
      padded += c;
      padded += ' ';
    } else {
      padded += c;
    }
  }

  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < padded.size()) {
    while (i < padded.size() && std::isspace(static_cast<unsigned char>(padded[i]))) {
      ++i;
    }
    std::size_t start = i;
    while (i < padded.size() && !std::isspace(static_cast<unsigned char>(padded[i]))) {
      ++i;
    }
    if (i > start) {
      tokens.push_back(padded.substr(start, i - start));
    }
  }
  return tokens;
}

double brevity_penalty(std::int64_t hyp_len, std::int64_t ref_len) {
  if (hyp_len <= 0) {
    return 0.0;
  }
  if (hyp_len >= ref_len) {
    return 1.0;
  }
  return std::exp(1.0 - static_cast<double>(ref_len) /
                            static_cast<double>(hyp_len));
}

namespace {

constexpr int kBleuMaxOrder = 4;
constexpr int kChrfMaxOrder = 6;
constexpr double kChrfBeta = 2.0;

void require_parallel(const std::vector<std::string>& hyps,
                      const std::vector<std::string>& refs) {
  if (hyps.size() != refs.size()) {
    throw InputError("hypothesis/reference counts differ: " +
                     std::to_string(hyps.size()) + " vs " +
                     std::to_string(refs.size()));
  }
  if (hyps.empty()) {
    throw InputError("corpus metrics require at least one segment");
  }
}

// Clipped matches and hypothesis totals for word n-grams of one order.
void accumulate_word_order(const std::vector<std::string>& hyp_tokens,
                           const std::vector<std::string>& ref_tokens, int n,
                           std::int64_t& match, std::int64_t& total) {
  const auto count_ngrams = [n](const std::vector<std::string>& tokens) {
    std::map<std::vector<std::string>, std::int64_t> counts;
    if (tokens.size() >= static_cast<std::size_t>(n)) {
      for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        counts[{tokens.begin() + i, tokens.begin() + i + n}] += 1;
      }
    }
    return counts;
  };
  const auto hyp_counts = count_ngrams(hyp_tokens);
  const auto ref_counts = count_ngrams(ref_tokens);
  for (const auto& [gram, count] : hyp_counts) {
    total += count;
    const auto it = ref_counts.find(gram);
    if (it != ref_counts.end()) {
      match += std::min(count, it->second);
    }
  }
}

}  // namespace

CorpusScore bleu_corpus(const std::vector<std::string>& hyps,
                        const std::vector<std::string>& refs) {
  require_parallel(hyps, refs);

  std::int64_t hyp_len = 0;
  std::int64_t ref_len = 0;
  std::int64_t matches[kBleuMaxOrder] = {};
  std::int64_t totals[kBleuMaxOrder] = {};
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const auto hyp_tokens = tokenize_13a(hyps[i]);
    const auto ref_tokens = tokenize_13a(refs[i]);
    hyp_len += static_cast<std::int64_t>(hyp_tokens.size());
    ref_len += static_cast<std::int64_t>(ref_tokens.size());
    for (int n = 1; n <= kBleuMaxOrder; ++n) {
      accumulate_word_order(hyp_tokens, ref_tokens, n, matches[n - 1],
                            totals[n - 1]);
    }
  }

  CorpusScore score;
  score.metric = CorpusMetric::Bleu;
  score.signature = kBleuSignature;
  score.n = static_cast<std::int64_t>(hyps.size());
  if (hyp_len == 0) {
    return score;  // nothing was hypothesized; BLEU is 0
  }

  double log_precision_sum = 0.0;
  std::int64_t smoothing = 1;
  for (int n = 1; n <= kBleuMaxOrder; ++n) {
    const std::int64_t total = totals[n - 1];
    const std::int64_t match = matches[n - 1];
    if (total == 0) {
      return score;  // an order with no n-grams at all zeroes the mean
    }
    double p;
    if (match == 0) {
      smoothing *= 2;
      p = 1.0 / (static_cast<double>(smoothing) * static_cast<double>(total));
    } else {
      p = static_cast<double>(match) / static_cast<double>(total);
    }
    log_precision_sum += std::log(p);
  }
  score.value = 100.0 * brevity_penalty(hyp_len, ref_len) *
                std::exp(log_precision_sum / kBleuMaxOrder);
  return score;
}

CorpusScore chrf_corpus(const std::vector<std::string>& hyps,
                        const std::vector<std::string>& refs) {
  require_parallel(hyps, refs);

  const auto strip_whitespace = [](const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (const char c : text) {
      if (!std::isspace(static_cast<unsigned char>(c))) {
        out += c;
      }
    }
    return out;
  };
  const auto count_ngrams = [](const std::string& chars, int n) {
    std::map<std::string_view, std::int64_t> counts;
    if (chars.size() >= static_cast<std::size_t>(n)) {
      for (std::size_t i = 0; i + n <= chars.size(); ++i) {
        counts[std::string_view(chars).substr(i, n)] += 1;
      }
    }
    return counts;
  };

  std::int64_t matches[kChrfMaxOrder] = {};
  std::int64_t hyp_totals[kChrfMaxOrder] = {};
  std::int64_t ref_totals[kChrfMaxOrder] = {};
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const std::string hyp = strip_whitespace(hyps[i]);
    const std::string ref = strip_whitespace(refs[i]);
    for (int n = 1; n <= kChrfMaxOrder; ++n) {
      const auto hyp_counts = count_ngrams(hyp, n);
      const auto ref_counts = count_ngrams(ref, n);
      for (const auto& [gram, count] : hyp_counts) {
        hyp_totals[n - 1] += count;
        const auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) {
          matches[n - 1] += std::min(count, it->second);
        }
      }
      for (const auto& [gram, count] : ref_counts) {
        ref_totals[n - 1] += count;
      }
    }
  }

  double f_sum = 0.0;
  int effective_orders = 0;
  for (int n = 1; n <= kChrfMaxOrder; ++n) {
    const std::int64_t hyp_total = hyp_totals[n - 1];
    const std::int64_t ref_total = ref_totals[n - 1];
    if (hyp_total + ref_total == 0) {
      continue;  // order unpopulated on both sides: not counted (eff:yes)
    }
    ++effective_orders;
    if (hyp_total == 0 || ref_total == 0) {
      continue;  // F = 0 for a one-sided order
    }
    const double precision = static_cast<double>(matches[n - 1]) /
                             static_cast<double>(hyp_total);
    const double recall = static_cast<double>(matches[n - 1]) /
                          static_cast<double>(ref_total);
    const double beta_sq = kChrfBeta * kChrfBeta;
    const double denominator = beta_sq * precision + recall;
    if (denominator > 0.0) {
      f_sum += (1.0 + beta_sq) * precision * recall / denominator;
    }
  }

  CorpusScore score;
  score.metric = CorpusMetric::ChrF;
  score.signature = kChrfSignature;
  score.n = static_cast<std::int64_t>(hyps.size());
  if (effective_orders > 0) {
    score.value = 100.0 * f_sum / effective_orders;
  }
  return score;
}

}  // namespace signcurator::metrics
