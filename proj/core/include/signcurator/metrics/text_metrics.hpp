#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace signcurator::metrics {

enum class CorpusMetric {
  Bleu,
  ChrF,
  External,
};

std::string to_string(CorpusMetric metric);

struct CorpusScore {
  CorpusMetric metric = CorpusMetric::Bleu;
  double value = 0.0;      // [0, 100] for BLEU/chrF
  std::string signature;   // canonical config string, fixed per metric
  std::int64_t n = 0;      // segments scored
};

inline constexpr const char* kBleuSignature =
    "BLEU|nrefs:1|case:mixed|eff:no|tok:13a|smooth:exp";
inline constexpr const char* kChrfSignature =
    "chrF|nrefs:1|case:mixed|eff:yes|nc:6|nw:0|space:no";

// mteval-v13a-compatible tokenization, applied before whitespace splitting:
// (1) "-\n" deleted, remaining "\n" to spaces; (2) &quot; &amp; &lt; &gt;
// unescaped; (3) symbol characters space-padded unconditionally, '.' and
// ',' padded only when an adjacent character exists and is not a digit (so
// "3.5" stays one token); (4) split on whitespace. Case is preserved.
std::vector<std::string> tokenize_13a(const std::string& text);

// exp(1 - ref_len/hyp_len) when hyp_len < ref_len, else 1; 0 when hyp_len
// is 0. Exposed for the monotonicity property test.
double brevity_penalty(std::int64_t hyp_len, std::int64_t ref_len);

// Corpus BLEU over 13a tokens: clipped n-gram matches accumulated across
// segments for n = 1..4, geometric mean over all four orders, exponential
// smoothing for zero-match orders (multiplier doubles per such order and
// the order scores 1/(multiplier * total)). Any order with zero total, or
// an empty tokenized hypothesis side, scores 0. Hypothesis/reference count
// mismatch or an empty corpus raises InputError.
CorpusScore bleu_corpus(const std::vector<std::string>& hyps,
                        const std::vector<std::string>& refs);

// Corpus chrF: character n-grams n = 1..6 over whitespace-stripped text,
// corpus-aggregated precision/recall per order, F_2 per order, score = 100
// x mean F over effective orders. An order is effective iff the combined
// hypothesis+reference total is nonzero; an effective order where one side
// is empty contributes F = 0. Count mismatch or an empty corpus raises
// InputError.
CorpusScore chrf_corpus(const std::vector<std::string>& hyps,
                        const std::vector<std::string>& refs);

}  // namespace signcurator::metrics
